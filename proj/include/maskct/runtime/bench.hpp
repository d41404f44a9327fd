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
#include <string>
#include <vector>

#include <json.hpp>

#include "maskct/data/dataset.hpp"
#include "maskct/metrics/report.hpp"
#include "maskct/model/model.hpp"

namespace maskct::runtime {

enum class BenchMode {
  Model,     // frames decoded and prepared before the clock starts
  EndToEnd,  // decode and preparation run inside the timed loop via a prefetch queue
};

const char* to_string(BenchMode m);

struct BenchOptions {
  BenchMode mode = BenchMode::Model;
  int batch_size = 1;
  std::size_t queue_capacity = 8;
  bool deterministic = false;  // single thread, no prefetch thread
  unsigned threads = 0;
  double threshold = 0.5;
  bool keep_predictions = false;
};

struct BenchSubset {
  std::string name;
  const data::SampleSource* source = nullptr;
};

struct BenchRow {
  std::string subset;
  std::uint64_t frames = 0;
  double wall_seconds = 0.0;
  double fps = 0.0;
  metrics::MetricsReport metrics;
};

struct BenchResult {
  BenchMode mode = BenchMode::Model;
  int batch_size = 1;
  std::vector<BenchRow> rows;
  BenchRow average;  // "Ave.": mean of the subset rows
  std::uint64_t total_frames = 0;
  double total_wall_seconds = 0.0;
  double overall_fps = 0.0;  // total_frames / total_wall_seconds
  std::vector<std::vector<Eigen::VectorXd>> predictions;  // per subset, per frame (when kept)
  std::string config_hash;
};

// Streams each subset through the model with every label Masked.
BenchResult run_bench(const model::MaskCtModel& model, const std::vector<BenchSubset>& subsets,
                      const std::vector<std::string>& class_names, const BenchOptions& options);

nlohmann::ordered_json bench_to_json(const BenchResult& result);

}  // namespace maskct::runtime
