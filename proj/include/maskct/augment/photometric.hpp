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

struct PhotometricParams {
  double beta = 0.0;       // contrast increment
  double threshold = 127.5;  // intensity pivot T
  double alpha = 0.0;      // light adjustment range, gain is alpha + 1
};

// Per-pixel lightness in raw intensity units.
struct LightMap {
  int height = 0;
  int width = 0;
  double max_intensity = 255.0;
  std::vector<double> values;

  double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double mean() const;
};

enum class SaturationRule {
  // S' = S_low * L' + S_high * (1 - L'): both lightness branches blended by L'.
  Blend,
  // S' = S taken from the branch selected by L'. Used to test the colour-model round trip.
  Preserve,
};

// I' = I + (I - T) * beta / I_max, per channel, rounded and clamped.
ImagePlane adjust_contrast(const ImagePlane& img, double beta, double threshold);

// L = (max(R,G,B) + min(R,G,B)) / 2.
LightMap compute_light(const ImagePlane& img);

// L' = L_avg + (L - L_avg) * (alpha + 1).
LightMap adjust_light(const LightMap& light, double alpha);

// Saturation branch selected by normalized lightness (split at 0.5). Inputs normalized to [0,1].
double branch_saturation(double max_c, double min_c, double lightness);
double blended_saturation(double max_c, double min_c, double lightness);

// Recomposes every pixel in hue/saturation/lightness space using the adjusted
// lightness map and the chosen saturation rule. Pixels with max == min pass through.
ImagePlane adjust_saturation(const ImagePlane& img, const LightMap& adjusted,
                             SaturationRule rule = SaturationRule::Blend);

// contrast -> light -> light adjustment -> saturation.
ImagePlane adjust_photometric(const ImagePlane& img, const PhotometricParams& params,
                              SaturationRule rule = SaturationRule::Blend);

}  // namespace maskct::augment
