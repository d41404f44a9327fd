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

#include "maskct/augment/mask1.hpp"

#include <stdexcept>

namespace maskct::augment {

Mask1Result run_mask1(const ImagePlane& img, const Mask1Params& params, const MaskConfig& mask,
                      std::uint64_t seed, Mode mode) {
  Mask1Result result;
  if (mode == Mode::Eval) {
    result.output = img;
    return result;
  }
  mask.validate();
  if (params.beta_range < 0.0 || params.alpha_range < 0.0 || params.alpha_range >= 1.0)
    throw std::invalid_argument("photometric ranges must satisfy beta_range >= 0 and 0 <= alpha_range < 1");

  Rng rng = make_rng(seed);
  FragmentBatch batch = crop_multiscale(img, params.fragments, mask.box, rng, params.crop);
  const double threshold = params.threshold.value_or(img.max_intensity() / 2.0);
  std::uniform_real_distribution<double> beta_dist(-params.beta_range, params.beta_range);
  std::uniform_real_distribution<double> alpha_dist(-params.alpha_range, params.alpha_range);

  result.trace.resize(batch.fragments.size());
  result.adjusted = batch.fragments;
  for (std::size_t i = 0; i < batch.fragments.size(); ++i) result.trace[i].region = batch.regions[i];
  for (std::size_t idx : batch.photometric_subset) {
    PhotometricParams p{beta_dist(rng), threshold, alpha_dist(rng)};
    result.adjusted[idx] = adjust_photometric(batch.fragments[idx], p, params.saturation);
    result.trace[idx].photometric = true;
    result.trace[idx].params = p;
  }

  result.masked.reserve(result.adjusted.size());
  for (std::size_t i = 0; i < result.adjusted.size(); ++i) {
    MaskResult m = adaptive_mask(result.adjusted[i], mask);
    result.trace[i].occluders = std::move(m.occluders);
    result.masked.push_back(std::move(m.image));
  }

  std::uniform_int_distribution<std::size_t> pick(0, result.masked.size() - 1);
  result.selected = pick(rng);
  result.output = result.masked[result.selected];
  return result;
}

ImagePlane apply_mask1(const ImagePlane& img, const Mask1Params& params, const MaskConfig& mask,
                       std::uint64_t seed, Mode mode) {
  return run_mask1(img, params, mask, seed, mode).output;
}

}  // namespace maskct::augment
