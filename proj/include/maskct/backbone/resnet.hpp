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

#include <optional>
#include <string>
#include <vector>

#include "maskct/nn/layers.hpp"

namespace maskct::backbone {

// Residual network truncated after `stages` residual stages. Depth selects
// the torchvision block layout (18/34 basic, 50/101/152 bottleneck).
struct BackboneConfig {
  int depth = 18;
  int stages = 2;
  int base_width = 64;

  bool bottleneck() const { return depth >= 50; }
  int expansion() const { return bottleneck() ? 4 : 1; }
  std::vector<int> blocks_per_stage() const;
  // Total spatial downsampling: stem (x2) and max-pool (x2), then x2 per stage after the first.
  int stride() const { return 4 << (stages - 1); }
  int out_channels() const { return base_width * (1 << (stages - 1)) * expansion(); }
  void validate() const;
};

class ResidualBlock {
 public:
  struct Cache {
    std::vector<nn::Conv2d::Cache> conv;
    std::vector<nn::FrozenBatchNorm::Cache> norm;
    std::vector<Matrix> inner_relu;
    nn::Conv2d::Cache down_conv;
    nn::FrozenBatchNorm::Cache down_norm;
    Matrix output;
  };

  ResidualBlock(ParameterSet& ps, const std::string& name, int in_channels, int width, int stride,
                bool bottleneck, Rng& rng);

  SpatialTensor forward(const ParameterSet& ps, const SpatialTensor& x, Cache* cache) const;
  SpatialTensor backward(const ParameterSet& ps, const Cache& cache, const SpatialTensor& dy,
                         GradientSet& grads) const;
  int out_channels() const { return out_channels_; }

 private:
  std::vector<nn::Conv2d> convs_;
  std::vector<nn::FrozenBatchNorm> norms_;
  std::optional<nn::Conv2d> down_conv_;
  std::optional<nn::FrozenBatchNorm> down_norm_;
  int out_channels_ = 0;
};

class ResNetPrefix {
 public:
  struct Cache {
    nn::Conv2d::Cache stem_conv;
    nn::FrozenBatchNorm::Cache stem_norm;
    Matrix stem_relu;
    nn::MaxPool2d::Cache pool;
    std::vector<ResidualBlock::Cache> blocks;
  };

  ResNetPrefix(const BackboneConfig& config, ParameterSet& ps, Rng& rng, std::string prefix = "backbone");

  SpatialTensor forward(const ParameterSet& ps, const SpatialTensor& input, Cache* cache) const;
  // Backpropagates into the backbone parameters. The image gradient is not needed.
  void backward(const ParameterSet& ps, const Cache& cache, const SpatialTensor& dy, GradientSet& grads) const;

  const BackboneConfig& config() const { return config_; }
  const std::string& prefix() const { return prefix_; }
  // Parameter ids registered by this backbone, in registration order.
  const std::vector<ParamId>& parameter_ids() const { return ids_; }

 private:
  BackboneConfig config_;
  std::string prefix_;
  nn::Conv2d stem_conv_;
  nn::FrozenBatchNorm stem_norm_;
  nn::MaxPool2d pool_;
  std::vector<ResidualBlock> blocks_;
  std::vector<ParamId> ids_;
};

}  // namespace maskct::backbone
