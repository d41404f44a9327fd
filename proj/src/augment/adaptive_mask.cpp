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

#include "maskct/augment/adaptive_mask.hpp"

#include <stdexcept>
#include <string>

namespace maskct::augment {

void MaskConfig::validate() const {
  if (box < 2 || box % 2 != 0) throw std::invalid_argument("mask box size must be even and >= 2, got " + std::to_string(box));
}

MaskResult adaptive_mask(const ImagePlane& img, const MaskConfig& config) {
  config.validate();
  const int h = img.height(), w = img.width(), d = config.box;
  if (h < d || w < d) throw std::invalid_argument("image smaller than mask box");

  // Summed-area table of per-pixel channel sums, (h+1) x (w+1).
  std::vector<double> sat(static_cast<std::size_t>(h + 1) * (w + 1), 0.0);
  auto s = [&](int y, int x) -> double& { return sat[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += img.at(y, x, 0) + img.at(y, x, 1) + img.at(y, x, 2);
      s(y + 1, x + 1) = s(y, x + 1) + row;
    }
  }
  const double total = s(h, w);
  const double image_area = static_cast<double>(h) * w;
  const double window_area = static_cast<double>(d) * d;

  MaskResult result{img, {}};
  const int step = config.stride();
  const int patch = config.patch();
  for (int y = 0; y + d <= h; y += step) {
    for (int x = 0; x + d <= w; x += step) {
      const double window = s(y + d, x + d) - s(y, x + d) - s(y + d, x) + s(y, x);
      // window / window_area > total / image_area, cross-multiplied.
      if (window * image_area > total * window_area) result.occluders.push_back(Rect{x, y, patch, patch});
    }
  }
  for (const Rect& r : result.occluders)
    for (int y = r.y; y < r.y + r.height; ++y)
      for (int x = r.x; x < r.x + r.width; ++x)
        for (int c = 0; c < 3; ++c) result.image.at(y, x, c) = config.fill;
  return result;
}

}  // namespace maskct::augment
