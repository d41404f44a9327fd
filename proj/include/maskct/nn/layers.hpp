// Copyright 2026 The maskct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "maskct/core/parameters.hpp"
#include "maskct/core/rng.hpp"
#include "maskct/core/tensor.hpp"

// Building blocks with explicit forward/backward. Layers hold parameter ids
// only; values live in a ParameterSet passed to every call, and per-call state
// lives in a Cache owned by the caller. A null cache means inference only.
namespace maskct::nn {

// y = x W + b, x: rows x in, W: in x out, b: 1 x out.
struct Linear {
  ParamId weight = 0;
  ParamId bias = 0;
  bool has_bias = true;
  int in_features = 0;
  int out_features = 0;

  static Linear create(ParameterSet& ps, const std::string& name, int in, int out, Rng& rng,
                       bool bias = true, double stddev = -1.0);
  Matrix forward(const ParameterSet& ps, const Matrix& x) const;
  // Accumulates weight/bias gradients; returns dL/dx.
  Matrix backward(const ParameterSet& ps, const Matrix& x, const Matrix& dy, GradientSet& grads) const;
};

// Per-row normalization over the feature axis.
struct LayerNorm {
  ParamId gamma = 0;
  ParamId beta = 0;
  double eps = 1e-5;

  struct Cache {
    Matrix normalized;
    Eigen::VectorXd inv_std;
  };

  static LayerNorm create(ParameterSet& ps, const std::string& name, int features);
  Matrix forward(const ParameterSet& ps, const Matrix& x, Cache* cache) const;
  Matrix backward(const ParameterSet& ps, const Cache& cache, const Matrix& dy, GradientSet& grads) const;
};

// Inverted dropout. The mask already carries the 1/(1-p) scale.
struct Dropout {
  double rate = 0.0;

  Matrix sample_mask(Eigen::Index rows, Eigen::Index cols, Rng& rng) const;
};

inline Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }
// Gradient through ReLU given its output.
inline Matrix relu_backward(const Matrix& out, const Matrix& dy) {
  return (out.array() > 0.0).select(dy, 0.0);
}

// Row-wise softmax, stable against large logits.
Matrix softmax_rows(const Matrix& logits);

// 2-D convolution without bias over HWC tensors, computed as im2col + GEMM.
// Weight layout: (kernel*kernel*in) x out, row index (ky*kernel + kx)*in + c.
struct Conv2d {
  ParamId weight = 0;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 1;
  int stride = 1;
  int padding = 0;

  struct Cache {
    int in_height = 0;
    int in_width = 0;
    Matrix columns;
  };

  static Conv2d create(ParameterSet& ps, const std::string& name, int in, int out, int kernel, int stride,
                       int padding, Rng& rng);
  int output_extent(int in) const { return (in + 2 * padding - kernel) / stride + 1; }
  SpatialTensor forward(const ParameterSet& ps, const SpatialTensor& x, Cache* cache) const;
  SpatialTensor backward(const ParameterSet& ps, const Cache& cache, const SpatialTensor& dy, GradientSet& grads,
                         bool input_grad = true) const;
};

// Batch norm with frozen statistics: y = (x - mean) / sqrt(var + eps) * gamma + beta.
// gamma/beta are trainable, mean/var are buffers. Forward is per-sample, so
// batch composition never changes a sample's output.
struct FrozenBatchNorm {
  ParamId gamma = 0;
  ParamId beta = 0;
  ParamId running_mean = 0;
  ParamId running_var = 0;
  double eps = 1e-5;

  struct Cache {
    Matrix normalized;
  };

  static FrozenBatchNorm create(ParameterSet& ps, const std::string& name, int channels, double gamma_init = 1.0);
  SpatialTensor forward(const ParameterSet& ps, const SpatialTensor& x, Cache* cache) const;
  SpatialTensor backward(const ParameterSet& ps, const Cache& cache, const SpatialTensor& dy, GradientSet& grads) const;
};

// 3x3 / stride 2 / pad 1 max pooling.
struct MaxPool2d {
  int kernel = 3;
  int stride = 2;
  int padding = 1;

  struct Cache {
    int in_height = 0;
    int in_width = 0;
    std::vector<Eigen::Index> argmax;  // flat input index per output element
  };

  int output_extent(int in) const { return (in + 2 * padding - kernel) / stride + 1; }
  SpatialTensor forward(const SpatialTensor& x, Cache* cache) const;
  SpatialTensor backward(const Cache& cache, const SpatialTensor& dy) const;
};

}  // namespace maskct::nn
