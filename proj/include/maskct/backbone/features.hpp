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

#include "maskct/augment/image_plane.hpp"
#include "maskct/nn/layers.hpp"

namespace maskct::backbone {

// h' x w' x k backbone output, stored (h'*w') x k in row-major cell order.
struct FeatureMap {
  int height = 0;
  int width = 0;
  Matrix values;
  std::vector<Rect> origin;  // source-image patch of each cell

  int channels() const { return static_cast<int>(values.cols()); }
};

struct FeatureSequence {
  Matrix tokens;                // (h'*w') x d_model
  std::vector<Rect> positions;  // source rectangle per token
};

// Cell (i, j) covers [j*stride, (j+1)*stride) x [i*stride, (i+1)*stride).
std::vector<Rect> tiling_origin(int height, int width, int stride);

// Scales to [0, 1] and applies ImageNet channel normalisation.
SpatialTensor image_to_tensor(const ImagePlane& img);

// Row-major flatten followed by a learned projection to d_model.
class FeatureEmbedding {
 public:
  FeatureEmbedding() = default;
  FeatureEmbedding(ParameterSet& ps, const std::string& name, int channels, int d_model, Rng& rng);

  FeatureSequence forward(const ParameterSet& ps, const FeatureMap& map) const;
  // Returns dL/d(map values).
  Matrix backward(const ParameterSet& ps, const FeatureMap& map, const Matrix& dtokens, GradientSet& grads) const;

  const nn::Linear& projection() const { return projection_; }

 private:
  nn::Linear projection_;
};

}  // namespace maskct::backbone
