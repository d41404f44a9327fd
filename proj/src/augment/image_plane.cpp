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

#include "maskct/augment/image_plane.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace maskct {

ImagePlane::ImagePlane(int height, int width, double max_intensity, double fill)
    : height_(height), width_(width), max_intensity_(max_intensity) {
  if (height < 0 || width < 0) throw std::invalid_argument("image dimensions must be non-negative");
  pixels_.assign(static_cast<std::size_t>(height) * width * kChannels, fill);
}

ImagePlane ImagePlane::crop(const Rect& r) const {
  if (r.x < 0 || r.y < 0 || r.width <= 0 || r.height <= 0 || r.x + r.width > width_ ||
      r.y + r.height > height_)
    throw std::out_of_range("crop rectangle outside image");
  ImagePlane out(r.height, r.width, max_intensity_);
  for (int y = 0; y < r.height; ++y) {
    const double* src = &pixels_[index(r.y + y, r.x, 0)];
    std::copy(src, src + static_cast<std::size_t>(r.width) * kChannels, &out.pixels_[out.index(y, 0, 0)]);
  }
  return out;
}

double ImagePlane::mean() const {
  if (pixels_.empty()) return 0.0;
  return std::accumulate(pixels_.begin(), pixels_.end(), 0.0) / static_cast<double>(pixels_.size());
}

bool ImagePlane::in_range() const {
  return std::all_of(pixels_.begin(), pixels_.end(),
                     [&](double v) { return v >= 0.0 && v <= max_intensity_; });
}

double quantize_intensity(double value, double max_intensity) {
  // nearbyint honours the default round-to-nearest-even mode.
  return std::clamp(std::nearbyint(value), 0.0, max_intensity);
}

}  // namespace maskct
