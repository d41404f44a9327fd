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
#include <optional>
#include <vector>

#include "maskct/augment/adaptive_mask.hpp"
#include "maskct/augment/fragments.hpp"
#include "maskct/augment/photometric.hpp"

namespace maskct::augment {

enum class Mode { Train, Eval };

struct Mask1Params {
  int fragments = 4;
  double beta_range = 64.0;                // beta ~ U[-beta_range, beta_range]
  double alpha_range = 0.3;                // alpha ~ U[-alpha_range, alpha_range]
  std::optional<double> threshold;         // defaults to I_max / 2
  CropConfig crop;
  SaturationRule saturation = SaturationRule::Blend;
};

struct FragmentTrace {
  Rect region;
  bool photometric = false;
  PhotometricParams params;  // meaningful only when photometric
  std::vector<Rect> occluders;
};

struct Mask1Result {
  ImagePlane output;
  std::vector<ImagePlane> adjusted;  // fragments after the photometric pass, before masking
  std::vector<ImagePlane> masked;    // fragments after adaptive masking
  std::vector<FragmentTrace> trace;
  std::size_t selected = 0;
};

// Full pipeline: crop -> photometric subset -> adaptive mask -> one fragment
// sampled uniformly. In eval mode the input is returned untouched.
Mask1Result run_mask1(const ImagePlane& img, const Mask1Params& params, const MaskConfig& mask,
                      std::uint64_t seed, Mode mode = Mode::Train);

ImagePlane apply_mask1(const ImagePlane& img, const Mask1Params& params, const MaskConfig& mask,
                       std::uint64_t seed, Mode mode = Mode::Train);

}  // namespace maskct::augment
