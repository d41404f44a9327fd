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

#include "maskct/augment/fragments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace maskct::augment {

std::size_t photometric_subset_size(std::size_t count, double fraction) {
  return static_cast<std::size_t>(std::lround(fraction * static_cast<double>(count)));
}

FragmentBatch crop_multiscale(const ImagePlane& img, int count, int min_side, Rng& rng,
                              const CropConfig& config) {
  if (count <= 0) throw std::invalid_argument("fragment count must be at least 1");
  if (img.empty()) throw std::invalid_argument("empty image");
  if (config.scale_min <= 0.0 || config.scale_min > config.scale_max || config.scale_max > 1.0)
    throw std::invalid_argument("crop scale range must satisfy 0 < min <= max <= 1");

  const int extent = std::min(img.height(), img.width());
  const int lo = static_cast<int>(std::ceil(config.scale_min * extent));
  const int hi = static_cast<int>(std::floor(config.scale_max * extent));
  if (lo < min_side)
    throw std::invalid_argument("smallest crop (" + std::to_string(lo) + " px) is below the mask box size " +
                                std::to_string(min_side));

  FragmentBatch batch;
  batch.fragments.reserve(count);
  batch.regions.reserve(count);
  std::uniform_int_distribution<int> side_dist(lo, std::max(lo, hi));
  for (int i = 0; i < count; ++i) {
    const int side = side_dist(rng);
    std::uniform_int_distribution<int> xd(0, img.width() - side);
    std::uniform_int_distribution<int> yd(0, img.height() - side);
    const int x = xd(rng);
    const int y = yd(rng);
    Rect region{x, y, side, side};
    batch.regions.push_back(region);
    batch.fragments.push_back(img.crop(region));
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(photometric_subset_size(order.size(), config.photometric_fraction));
  std::sort(order.begin(), order.end());
  batch.photometric_subset = std::move(order);
  return batch;
}

}  // namespace maskct::augment
