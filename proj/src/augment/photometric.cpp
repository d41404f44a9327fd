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

#include "maskct/augment/photometric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace maskct::augment {
namespace {

void require_image(const ImagePlane& img) {
  if (img.empty()) throw std::invalid_argument("empty image");
  if (img.max_intensity() <= 0.0) throw std::invalid_argument("max intensity must be positive");
}

double hue_of(double r, double g, double b, double max_c, double min_c) {
  const double d = max_c - min_c;
  double h;
  if (max_c == r)
    h = std::fmod((g - b) / d, 6.0);
  else if (max_c == g)
    h = (b - r) / d + 2.0;
  else
    h = (r - g) / d + 4.0;
  if (h < 0) h += 6.0;
  return h;  // sextant units in [0, 6)
}

void hsl_to_rgb(double hue, double sat, double light, double rgb[3]) {
  const double chroma = (1.0 - std::abs(2.0 * light - 1.0)) * sat;
  const double x = chroma * (1.0 - std::abs(std::fmod(hue, 2.0) - 1.0));
  const double m = light - chroma / 2.0;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hue) % 6) {
    case 0: r = chroma; g = x; break;
    case 1: r = x; g = chroma; break;
    case 2: g = chroma; b = x; break;
    case 3: g = x; b = chroma; break;
    case 4: r = x; b = chroma; break;
    default: r = chroma; b = x; break;
  }
  rgb[0] = r + m;
  rgb[1] = g + m;
  rgb[2] = b + m;
}

}  // namespace

double LightMap::mean() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

ImagePlane adjust_contrast(const ImagePlane& img, double beta, double threshold) {
  require_image(img);
  const double imax = img.max_intensity();
  if (threshold < 0.0 || threshold > imax) throw std::invalid_argument("contrast threshold outside [0, I_max]");
  ImagePlane out = img;
  if (beta == 0.0) return out;
  for (double& v : out.data()) v = quantize_intensity(v + (v - threshold) * beta / imax, imax);
  return out;
}

LightMap compute_light(const ImagePlane& img) {
  require_image(img);
  if (img.channels() != 3) throw std::invalid_argument("lightness needs a 3-channel image");
  LightMap map{img.height(), img.width(), img.max_intensity(), {}};
  map.values.resize(static_cast<std::size_t>(img.height()) * img.width());
  auto px = img.data();
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const double r = px[3 * i], g = px[3 * i + 1], b = px[3 * i + 2];
    map.values[i] = 0.5 * (std::max({r, g, b}) + std::min({r, g, b}));
  }
  return map;
}

LightMap adjust_light(const LightMap& light, double alpha) {
  if (!(alpha > -1.0)) throw std::invalid_argument("alpha must be greater than -1");
  LightMap out = light;
  if (alpha == 0.0) return out;
  const double avg = light.mean();
  const double gain = alpha + 1.0;
  for (double& v : out.values) v = avg + (v - avg) * gain;
  return out;
}

double branch_saturation(double max_c, double min_c, double lightness) {
  const double spread = max_c - min_c;
  if (spread == 0.0) return 0.0;
  if (lightness <= 0.5) return spread / (max_c + min_c);
  return spread / (2.0 - (max_c + min_c));
}

double blended_saturation(double max_c, double min_c, double lightness) {
  const double spread = max_c - min_c;
  if (spread == 0.0) return 0.0;
  const double low = spread / (max_c + min_c);
  const double high = spread / (2.0 - (max_c + min_c));
  return low * lightness + high * (1.0 - lightness);
}

ImagePlane adjust_saturation(const ImagePlane& img, const LightMap& adjusted, SaturationRule rule) {
  require_image(img);
  if (adjusted.height != img.height() || adjusted.width != img.width())
    throw std::invalid_argument("light map dimensions do not match image");
  const double imax = img.max_intensity();
  ImagePlane out = img;
  auto px = out.data();
  const std::size_t n = adjusted.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = px[3 * i] / imax, g = px[3 * i + 1] / imax, b = px[3 * i + 2] / imax;
    const double max_c = std::max({r, g, b});
    const double min_c = std::min({r, g, b});
    if (max_c == min_c) continue;
    const double light = std::clamp(adjusted.values[i] / imax, 0.0, 1.0);
    const double sat = rule == SaturationRule::Blend ? blended_saturation(max_c, min_c, light)
                                                     : branch_saturation(max_c, min_c, light);
    double rgb[3];
    hsl_to_rgb(hue_of(r, g, b, max_c, min_c), std::clamp(sat, 0.0, 1.0), light, rgb);
    for (int c = 0; c < 3; ++c) px[3 * i + c] = quantize_intensity(rgb[c] * imax, imax);
  }
  return out;
}

ImagePlane adjust_photometric(const ImagePlane& img, const PhotometricParams& params, SaturationRule rule) {
  ImagePlane contrasted = adjust_contrast(img, params.beta, params.threshold);
  LightMap light = adjust_light(compute_light(contrasted), params.alpha);
  return adjust_saturation(contrasted, light, rule);
}

}  // namespace maskct::augment
