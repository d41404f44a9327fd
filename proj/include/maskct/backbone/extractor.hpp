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

#include <cstdint>
#include <filesystem>
#include <string>

#include "maskct/backbone/features.hpp"
#include "maskct/backbone/resnet.hpp"

namespace maskct::backbone {

struct WfeConfig {
  BackboneConfig backbone;
  int input_size = 384;

  int grid() const { return input_size / backbone.stride(); }
  int tokens() const { return grid() * grid(); }
  void validate() const;
};

// Weather feature extractor: a truncated residual network over a fixed input size.
class WeatherFeatureExtractor {
 public:
  using Cache = ResNetPrefix::Cache;

  WeatherFeatureExtractor(const WfeConfig& config, ParameterSet& ps, Rng& rng);

  // Eval-mode forward unless a cache is supplied for training.
  FeatureMap extract(const ParameterSet& ps, const ImagePlane& img, Cache* cache = nullptr) const;
  void backward(const ParameterSet& ps, const Cache& cache, const Matrix& dmap, GradientSet& grads) const;

  // Throws if `ps` does not carry this extractor's weights (wrong or empty parameter set).
  void verify_weights(const ParameterSet& ps) const;

  const WfeConfig& config() const { return config_; }
  const ResNetPrefix& network() const { return network_; }

 private:
  WfeConfig config_;
  ResNetPrefix network_;
  std::vector<std::string> expected_names_;
};

struct LoadReport {
  std::size_t tensors = 0;
  std::size_t scalars = 0;
  std::string checksum;  // FNV-1a over the loaded values
};

// Loads the backbone prefix from a named-tensor container. Tensors beyond the
// prefix (deeper stages, classifier) are ignored; a missing or mis-shaped
// prefix tensor is an error naming the layer. Accepts 4-D conv weights in
// [out, in, kh, kw] order and converts them to the im2col layout.
LoadReport load_pretrained_weights(const std::filesystem::path& source, const ResNetPrefix& network,
                                   ParameterSet& ps);

// Checksum over the parameters whose names start with `prefix`.
std::string parameter_checksum(const ParameterSet& ps, const std::string& prefix);

}  // namespace maskct::backbone
