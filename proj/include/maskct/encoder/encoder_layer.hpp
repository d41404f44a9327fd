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

#include "maskct/encoder/attention.hpp"

namespace maskct::encoder {

struct EncoderConfig {
  int d_model = 256;
  int heads = 4;
  int layers = 4;
  int ffn_width = 2048;
  double ffn_dropout = 0.1;

  void validate() const;
};

// ReLU(x W_r + b1) W_o + b2, dropout on the hidden activations.
struct FeedForward {
  nn::Linear expand;
  nn::Linear contract;
  nn::Dropout dropout;

  struct Cache {
    Matrix input;
    Matrix hidden;  // after ReLU
    Matrix mask;    // empty when dropout was not applied
    Matrix dropped;
  };

  Matrix forward(const ParameterSet& ps, const Matrix& x, Cache* cache, Rng* rng) const;
  Matrix backward(const ParameterSet& ps, const Cache& cache, const Matrix& dy, GradientSet& grads) const;
};

// Pre-norm block: x + MHA(LN(x)), then + FFN(LN(.)).
struct EncoderLayer {
  nn::LayerNorm attn_norm;
  MultiHeadAttention attention;
  nn::LayerNorm ffn_norm;
  FeedForward ffn;

  struct Cache {
    nn::LayerNorm::Cache attn_norm;
    MultiHeadAttention::Cache attention;
    nn::LayerNorm::Cache ffn_norm;
    FeedForward::Cache ffn;
  };

  static EncoderLayer create(ParameterSet& ps, const std::string& name, const EncoderConfig& config, Rng& rng);
  // `rng` drives dropout; pass null for deterministic eval.
  Matrix forward(const ParameterSet& ps, const Matrix& x, Cache* cache, Rng* rng) const;
  Matrix backward(const ParameterSet& ps, const Cache& cache, const Matrix& dy, GradientSet& grads) const;
};

// Layers applied in sequence, no weight sharing.
class EncoderArray {
 public:
  using Cache = std::vector<EncoderLayer::Cache>;

  EncoderArray() = default;
  EncoderArray(ParameterSet& ps, const std::string& name, const EncoderConfig& config, Rng& rng);

  Matrix forward(const ParameterSet& ps, const Matrix& x, Cache* cache, Rng* rng) const;
  Matrix backward(const ParameterSet& ps, const Cache& cache, const Matrix& dy, GradientSet& grads) const;

  const std::vector<EncoderLayer>& layers() const { return layers_; }

 private:
  std::vector<EncoderLayer> layers_;
};

}  // namespace maskct::encoder
