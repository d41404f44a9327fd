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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace maskct::runtime {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3, kNumericalError = 4 };

struct TrainArgs {
  std::filesystem::path config;
  std::vector<std::string> overrides;
  std::optional<int> max_epochs;
  std::optional<std::filesystem::path> output_dir;
  bool resume = false;
};

struct EvalArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path manifest;
  double threshold = 0.5;
  std::string split;  // empty = every record
  std::optional<std::filesystem::path> output;
  unsigned threads = 0;
};

struct PredictArgs {
  std::filesystem::path checkpoint;
  std::vector<std::filesystem::path> images;
  std::vector<std::string> evidence;  // "label=0|1"
  double threshold = 0.5;
  std::optional<std::filesystem::path> output;
};

struct BenchArgs {
  std::filesystem::path checkpoint;
  std::vector<std::string> subsets;  // "name=manifest.jsonl"
  std::string mode = "model";        // model | e2e | both
  int batch_size = 1;
  bool deterministic = false;
  std::size_t queue_capacity = 8;
  double threshold = 0.5;
  unsigned threads = 0;
  std::optional<std::filesystem::path> output;
};

struct AugmentPreviewArgs {
  std::filesystem::path image;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  int fragments = 4;
  int box = 18;
  double beta_range = 64.0;
  double alpha_range = 0.3;
};

struct SplitArgs {
  std::filesystem::path manifest;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::vector<double> ratios{0.70, 0.10, 0.20};
  bool binarize = false;
};

struct IngestVideoArgs {
  std::filesystem::path spec;
  std::filesystem::path output;  // manifest path
  std::optional<std::filesystem::path> frames_dir;
};

// Each command writes its JSON summary to `out` and returns an exit code.
// Errors propagate as exceptions; run_guarded maps them to exit codes.
int cmd_train(const TrainArgs& args, std::ostream& out);
int cmd_eval(const EvalArgs& args, std::ostream& out);
int cmd_predict(const PredictArgs& args, std::ostream& out);
int cmd_bench(const BenchArgs& args, std::ostream& out);
int cmd_augment_preview(const AugmentPreviewArgs& args, std::ostream& out);
int cmd_split(const SplitArgs& args, std::ostream& out);
int cmd_ingest_video(const IngestVideoArgs& args, std::ostream& out);

template <typename Fn>
int run_guarded(Fn&& fn, std::ostream& err);

}  // namespace maskct::runtime

#include "maskct/runtime/commands_inl.hpp"
