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
#include <vector>

#include "maskct/augment/image_plane.hpp"
#include "maskct/core/rng.hpp"

namespace maskct::augment {

struct CropConfig {
  double scale_min = 0.5;  // crop side as a fraction of min(H, W)
  double scale_max = 1.0;
  double photometric_fraction = 0.25;
};

struct FragmentBatch {
  std::vector<ImagePlane> fragments;
  std::vector<Rect> regions;                    // source rectangle of each fragment
  std::vector<std::size_t> photometric_subset;  // sorted, unique
};

// Number of fragments that receive the photometric pass: round(fraction * count).
std::size_t photometric_subset_size(std::size_t count, double fraction);

// `count` square crops at random scale and position; each side is at least `min_side`.
FragmentBatch crop_multiscale(const ImagePlane& img, int count, int min_side, Rng& rng,
                              const CropConfig& config = {});

}  // namespace maskct::augment
