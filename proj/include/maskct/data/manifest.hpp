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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace maskct::data {

enum class Split { Train, Val, Test, Unassigned };

const char* to_string(Split s);
Split parse_split(const std::string& s);

struct ManifestRecord {
  std::string path;
  std::vector<std::uint8_t> bits;
  Split split = Split::Unassigned;
  std::string source;
  std::optional<std::vector<double>> intensities;
  std::optional<std::int64_t> frame;

  bool operator==(const ManifestRecord&) const = default;
};

// Line-delimited JSON. The first line is a header
//   {"manifest": 1, "vocabulary": "<path>", "labels": N}
// followed by one record per line:
//   {"path": ..., "bits": [...], "split": "train", "source": ..., "intensities": [...], "frame": n}
// Relative record paths are resolved against the manifest's directory.
struct DatasetManifest {
  std::string vocabulary;
  std::size_t labels = 0;
  std::vector<ManifestRecord> records;
  std::filesystem::path base_dir;

  static DatasetManifest read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;

  // Paths unique, every bit vector of length `labels`, bits binary.
  void validate() const;
  DatasetManifest filter(Split split) const;
  std::filesystem::path resolve(const ManifestRecord& record) const;

  bool operator==(const DatasetManifest& o) const { return vocabulary == o.vocabulary && labels == o.labels && records == o.records; }
};

// bit = 1 iff intensity >= 0.5. Intensities must lie in [0, 1].
std::vector<std::uint8_t> binarize_transient(std::span<const double> intensities);

struct SplitRatios {
  double train = 0.70;
  double val = 0.10;
  double test = 0.20;
};

struct SplitResult {
  DatasetManifest train;
  DatasetManifest val;
  DatasetManifest test;
};

// Shuffles records by seed, then assigns round(train*n) to train,
// round(val*n) to val and the remainder to test. Split tags are rewritten.
SplitResult split_dataset(const DatasetManifest& manifest, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace maskct::data
