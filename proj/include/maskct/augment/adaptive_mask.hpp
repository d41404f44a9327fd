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

#include <vector>

#include "maskct/augment/image_plane.hpp"

namespace maskct::augment {

struct MaskConfig {
  int box = 18;       // scan window side D
  double fill = 0.0;  // occluder intensity

  int stride() const { return box / 2; }
  int patch() const { return box / 2; }
  void validate() const;
};

struct MaskResult {
  ImagePlane image;
  std::vector<Rect> occluders;
};

// Scans box x box windows at stride box/2. Every window whose mean (over all
// three channels) is strictly greater than the whole-image mean gets a
// (box/2) x (box/2) occluder at its top-left corner. Window means are taken on
// the input image, so the scan order does not matter.
MaskResult adaptive_mask(const ImagePlane& img, const MaskConfig& config);

}  // namespace maskct::augment
