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
#include <memory>
#include <string>
#include <vector>

#include "maskct/augment/image_plane.hpp"
#include "maskct/core/rng.hpp"
#include "maskct/data/manifest.hpp"

namespace maskct::data {

struct Sample {
  std::string id;
  ImagePlane image;
  std::vector<std::uint8_t> truth;
};

// Random-access sample provider; load() must be safe to call concurrently.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t num_labels() const = 0;
  virtual Sample load(std::size_t index) const = 0;
};

class MemorySource : public SampleSource {
 public:
  explicit MemorySource(std::vector<Sample> samples);

  std::size_t size() const override { return samples_.size(); }
  std::size_t num_labels() const override { return labels_; }
  Sample load(std::size_t index) const override { return samples_.at(index); }
  const std::vector<Sample>& samples() const { return samples_; }

 private:
  std::vector<Sample> samples_;
  std::size_t labels_ = 0;
};

// Decodes manifest records from disk on demand.
class ManifestSource : public SampleSource {
 public:
  explicit ManifestSource(DatasetManifest manifest);

  std::size_t size() const override { return manifest_.records.size(); }
  std::size_t num_labels() const override { return manifest_.labels; }
  Sample load(std::size_t index) const override;
  const DatasetManifest& manifest() const { return manifest_; }

 private:
  DatasetManifest manifest_;
};

enum class PrepareMode { Train, Eval };

struct PrepareConfig {
  int size = 384;
  double noise_fraction = 0.01;  // Gaussian sigma as a fraction of I_max (train mode only)
};

// Bilinear resize to size x size; in train mode adds i.i.d. Gaussian noise
// with sigma = noise_fraction * I_max. Output is rounded and clamped.
ImagePlane prepare_sample(const ImagePlane& img, PrepareMode mode, const PrepareConfig& config, Rng* rng = nullptr);

// Synthetic multi-label set with one planted visual cue per class:
// class 0/1/2 raise the red/green/blue channel, class 3 adds horizontal
// stripes, class 4 vertical stripes, further classes add checkerboards of
// growing period. Truth bits are drawn with probability 0.5 each.
std::vector<Sample> make_cue_dataset(std::size_t count, int size, std::size_t classes, std::uint64_t seed);

// Renders the cue image for a given truth vector.
ImagePlane render_cue_image(const std::vector<std::uint8_t>& truth, int size, Rng& rng);

}  // namespace maskct::data
