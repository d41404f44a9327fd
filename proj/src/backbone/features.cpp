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

#include "maskct/backbone/features.hpp"

#include <stdexcept>

namespace maskct::backbone {

std::vector<Rect> tiling_origin(int height, int width, int stride) {
  std::vector<Rect> rects;
  rects.reserve(static_cast<std::size_t>(height) * width);
  for (int i = 0; i < height; ++i)
    for (int j = 0; j < width; ++j) rects.push_back(Rect{j * stride, i * stride, stride, stride});
  return rects;
}

SpatialTensor image_to_tensor(const ImagePlane& img) {
  static constexpr double kMean[3] = {0.485, 0.456, 0.406};
  static constexpr double kStd[3] = {0.229, 0.224, 0.225};
  SpatialTensor t{img.height(), img.width(), Matrix(static_cast<Eigen::Index>(img.height()) * img.width(), 3)};
  const double scale = 1.0 / img.max_intensity();
  auto px = img.data();
  for (Eigen::Index i = 0; i < t.values.rows(); ++i)
    for (int c = 0; c < 3; ++c)
      t.values(i, c) = (px[static_cast<std::size_t>(i) * 3 + c] * scale - kMean[c]) / kStd[c];
  return t;
}

FeatureEmbedding::FeatureEmbedding(ParameterSet& ps, const std::string& name, int channels, int d_model, Rng& rng)
    : projection_(nn::Linear::create(ps, name, channels, d_model, rng)) {}

FeatureSequence FeatureEmbedding::forward(const ParameterSet& ps, const FeatureMap& map) const {
  return FeatureSequence{projection_.forward(ps, map.values), map.origin};
}

Matrix FeatureEmbedding::backward(const ParameterSet& ps, const FeatureMap& map, const Matrix& dtokens,
                                  GradientSet& grads) const {
  return projection_.backward(ps, map.values, dtokens, grads);
}

}  // namespace maskct::backbone
