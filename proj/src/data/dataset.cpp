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

#include "maskct/data/dataset.hpp"

#include <cstdio>
#include <random>

#include "maskct/core/error.hpp"
#include "maskct/data/image_io.hpp"

namespace maskct::data {

MemorySource::MemorySource(std::vector<Sample> samples) : samples_(std::move(samples)) {
  if (!samples_.empty()) labels_ = samples_.front().truth.size();
  for (const auto& s : samples_)
    if (s.truth.size() != labels_) throw DataError("sample " + s.id + " has a mismatched label count");
}

ManifestSource::ManifestSource(DatasetManifest manifest) : manifest_(std::move(manifest)) { manifest_.validate(); }

Sample ManifestSource::load(std::size_t index) const {
  const ManifestRecord& r = manifest_.records.at(index);
  return Sample{r.path, decode_image(manifest_.resolve(r)), r.bits};
}

ImagePlane prepare_sample(const ImagePlane& img, PrepareMode mode, const PrepareConfig& config, Rng* rng) {
  if (img.empty()) throw DataError("cannot prepare an empty image");
  ImagePlane out = resize_bilinear(img, config.size, config.size);
  const double sigma = config.noise_fraction * out.max_intensity();
  if (mode == PrepareMode::Train && sigma > 0.0) {
    if (!rng) throw std::invalid_argument("train-mode noise needs a random stream");
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out.data()) v += noise(*rng);
  }
  for (double& v : out.data()) v = quantize_intensity(v, out.max_intensity());
  return out;
}

ImagePlane render_cue_image(const std::vector<std::uint8_t>& truth, int size, Rng& rng) {
  ImagePlane img(size, size, 255.0);
  std::uniform_real_distribution<double> jitter(-8.0, 8.0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c) {
        double v = 70.0 + jitter(rng);
        for (std::size_t k = 0; k < truth.size(); ++k) {
          if (!truth[k]) continue;
          if (k < 3) {
            if (static_cast<int>(k) == c) v += 90.0;
          } else if (k == 3) {
            if ((y / 2) % 2 == 0) v += 60.0;
          } else if (k == 4) {
            if ((x / 2) % 2 == 0) v += 60.0;
          } else {
            const int period = static_cast<int>(k) - 2;
            if ((x / period + y / period) % 2 == 0) v += 50.0;
          }
        }
        img.at(y, x, c) = quantize_intensity(v, 255.0);
      }
    }
  }
  return img;
}

std::vector<Sample> make_cue_dataset(std::size_t count, int size, std::size_t classes, std::uint64_t seed) {
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, {i});
    std::bernoulli_distribution coin(0.5);
    std::vector<std::uint8_t> truth(classes);
    for (auto& b : truth) b = coin(rng) ? 1 : 0;
    char id[32];
    std::snprintf(id, sizeof(id), "cue-%05zu", i);
    out.push_back(Sample{id, render_cue_image(truth, size, rng), truth});
  }
  return out;
}

}  // namespace maskct::data
