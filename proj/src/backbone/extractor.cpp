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

#include "maskct/backbone/extractor.hpp"

#include <stdexcept>

#include <spdlog/spdlog.h>

#include "maskct/core/error.hpp"
#include "maskct/core/hash.hpp"
#include "maskct/io/tensor_container.hpp"

namespace maskct::backbone {

void WfeConfig::validate() const {
  backbone.validate();
  if (input_size <= 0 || input_size % backbone.stride() != 0)
    throw std::invalid_argument("input size " + std::to_string(input_size) + " must be a positive multiple of stride " +
                                std::to_string(backbone.stride()));
}

WeatherFeatureExtractor::WeatherFeatureExtractor(const WfeConfig& config, ParameterSet& ps, Rng& rng)
    : config_(config), network_((config.validate(), config.backbone), ps, rng) {
  for (ParamId id : network_.parameter_ids()) expected_names_.push_back(ps.at(id).name);
}

void WeatherFeatureExtractor::verify_weights(const ParameterSet& ps) const {
  const auto& ids = network_.parameter_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= ps.size() || ps.at(ids[i]).name != expected_names_[i])
      throw std::invalid_argument("backbone weights missing: " + expected_names_[i]);
  }
}

FeatureMap WeatherFeatureExtractor::extract(const ParameterSet& ps, const ImagePlane& img, Cache* cache) const {
  if (img.height() != config_.input_size || img.width() != config_.input_size)
    throw std::invalid_argument("feature extractor expects " + std::to_string(config_.input_size) + "x" +
                                std::to_string(config_.input_size) + " input, got " + std::to_string(img.height()) +
                                "x" + std::to_string(img.width()));
  verify_weights(ps);
  SpatialTensor out = network_.forward(ps, image_to_tensor(img), cache);
  FeatureMap map;
  map.height = out.height;
  map.width = out.width;
  map.values = std::move(out.values);
  map.origin = tiling_origin(map.height, map.width, config_.backbone.stride());
  return map;
}

void WeatherFeatureExtractor::backward(const ParameterSet& ps, const Cache& cache, const Matrix& dmap,
                                       GradientSet& grads) const {
  const int g = config_.grid();
  network_.backward(ps, cache, SpatialTensor{g, g, dmap}, grads);
}

std::string parameter_checksum(const ParameterSet& ps, const std::string& prefix) {
  Fnv1a h;
  for (const auto& p : ps) {
    if (p.name.compare(0, prefix.size(), prefix) != 0) continue;
    h.update(p.name);
    h.update(p.value.data(), static_cast<std::size_t>(p.value.size()) * sizeof(double));
  }
  return h.hex();
}

LoadReport load_pretrained_weights(const std::filesystem::path& source, const ResNetPrefix& network,
                                   ParameterSet& ps) {
  if (!std::filesystem::exists(source)) throw DataError("pretrained checkpoint not found: " + source.string());
  const auto container = io::TensorContainer::read(source);
  LoadReport report;
  for (ParamId id : network.parameter_ids()) {
    Parameter& p = ps.at(id);
    if (!container.contains(p.name)) throw DataError("checkpoint is missing layer " + p.name);
    const auto& entry = container.entry(p.name);
    const auto rows = p.value.rows(), cols = p.value.cols();
    auto values = container.values(p.name);
    if (entry.shape.size() == 4) {
      // [out, in, kh, kw] -> rows (ky*k + kx)*in + c, column out.
      const auto out = entry.shape[0], in = entry.shape[1], kh = entry.shape[2], kw = entry.shape[3];
      if (kh != kw || rows != kh * kw * in || cols != out)
        throw DataError("shape mismatch for layer " + p.name);
      Matrix m(rows, cols);
      for (std::int64_t o = 0; o < out; ++o)
        for (std::int64_t c = 0; c < in; ++c)
          for (std::int64_t y = 0; y < kh; ++y)
            for (std::int64_t x = 0; x < kw; ++x)
              m((y * kw + x) * in + c, o) = values[static_cast<std::size_t>(((o * in + c) * kh + y) * kw + x)];
      p.value = std::move(m);
    } else {
      if (entry.element_count() != rows * cols || (entry.shape.size() == 2 && (entry.shape[0] != rows || entry.shape[1] != cols)))
        throw DataError("shape mismatch for layer " + p.name);
      p.value = Eigen::Map<Matrix>(values.data(), rows, cols);
    }
    ++report.tensors;
    report.scalars += static_cast<std::size_t>(rows * cols);
  }
  report.checksum = parameter_checksum(ps, network.prefix() + ".");
  spdlog::info("loaded {} backbone tensors ({} values) from {}, checksum {}", report.tensors, report.scalars,
               source.string(), report.checksum);
  return report;
}

}  // namespace maskct::backbone
