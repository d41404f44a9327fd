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

#include <cstddef>
#include <span>
#include <vector>

namespace maskct {

// Axis-aligned pixel rectangle: [x, x+width) x [y, y+height).
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool operator==(const Rect&) const = default;
  bool contains(int px, int py) const { return px >= x && px < x + width && py >= y && py < y + height; }
};

// H x W x 3 colour image, interleaved (HWC) with intensities in [0, max_intensity].
class ImagePlane {
 public:
  static constexpr int kChannels = 3;

  ImagePlane() = default;
  ImagePlane(int height, int width, double max_intensity = 255.0, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return kChannels; }
  double max_intensity() const { return max_intensity_; }
  bool empty() const { return pixels_.empty(); }
  std::size_t size() const { return pixels_.size(); }

  double& at(int y, int x, int c) { return pixels_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return pixels_[index(y, x, c)]; }

  std::span<double> data() { return pixels_; }
  std::span<const double> data() const { return pixels_; }

  ImagePlane crop(const Rect& region) const;
  // Mean over every pixel and channel.
  double mean() const;
  bool in_range() const;

  bool operator==(const ImagePlane&) const = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
  }

  int height_ = 0;
  int width_ = 0;
  double max_intensity_ = 255.0;
  std::vector<double> pixels_;
};

// Round-half-to-even then clamp to [0, max].
double quantize_intensity(double value, double max_intensity);

}  // namespace maskct
