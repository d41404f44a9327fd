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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskct/augment/mask1.hpp"
#include "maskct/data/dataset.hpp"
#include "maskct/labels/label_state.hpp"
#include "maskct/metrics/report.hpp"
#include "maskct/model/model.hpp"
#include "maskct/train/optimizer.hpp"

namespace maskct::train {

enum class LossScope { AllLabels, MaskedOnly };

struct TrainConfig {
  double lr = 1e-5;
  AdamConfig adam;
  int batch_size = 32;
  double mask_ratio = 0.25;
  bool mask1_enabled = true;
  augment::Mask1Params mask1;
  augment::MaskConfig mask;
  double noise_fraction = 0.01;
  PlateauConfig plateau;
  int max_epochs = 30;
  std::uint64_t seed = 0;
  LossScope loss_scope = LossScope::AllLabels;
  int gradient_shards = 4;  // fixed reduction tree, independent of thread count
  unsigned threads = 0;     // 0 = hardware concurrency
  double threshold = 0.5;

  void validate() const;
  nlohmann::ordered_json to_json() const;
};

struct TrainState {
  int epoch = 0;         // completed epochs
  std::int64_t step = 0;  // completed optimizer steps
  double lr = 0.0;
  std::optional<double> best_metric;
  int bad_epochs = 0;
  Adam optimizer;
};

TrainState initial_state(const model::MaskCtModel& model, const TrainConfig& config);

struct StepResult {
  double loss = 0.0;
  std::size_t samples = 0;
};

// One Adam update on the given sample indices of `source`. Each sample gets
// its own random stream keyed by (seed, step, sample index): noise, MASK-I,
// MASK-II and dropout. Per-sample gradients are summed within fixed shards
// and the shards are reduced in order, so results do not depend on thread count.
StepResult train_step(model::MaskCtModel& model, TrainState& state, const data::SampleSource& source,
                      const std::vector<std::size_t>& batch, const TrainConfig& config);

struct Evaluation {
  metrics::ConfusionCounts counts;
  double loss = 0.0;  // mean all-masked BCE
  std::vector<Eigen::VectorXd> probabilities;
};

// Inference with every label Masked, no augmentation, resized to the model input.
Evaluation evaluate(const model::MaskCtModel& model, const data::SampleSource& source, double threshold,
                    unsigned threads = 0);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
  metrics::MetricsReport metrics;

  nlohmann::ordered_json to_json() const;
};

struct LoopOptions {
  std::filesystem::path output_dir;  // best.ckpt, last.ckpt, history.jsonl
  labels::LabelVocabulary vocabulary;
  std::string config_hash;
  std::string config_json;  // run-config snapshot stored in every checkpoint
  bool resume = false;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct LoopResult {
  std::vector<EpochRecord> history;
  std::optional<double> best_metric;
  std::filesystem::path best_checkpoint;
  std::filesystem::path last_checkpoint;
  std::filesystem::path history_path;
};

// Epoch loop with validation CF1 monitoring, plateau scheduling, best-CF1
// checkpointing and a line-delimited JSON history. With resume set, training
// continues from last.ckpt in output_dir and reproduces an uninterrupted run.
LoopResult train_loop(model::MaskCtModel& model, const data::SampleSource& train_source,
                      const data::SampleSource& val_source, const TrainConfig& config, const LoopOptions& options);

// Checkpoint round trip of the optimizer/scheduler state.
void save_training_checkpoint(const std::filesystem::path& path, const model::MaskCtModel& model,
                              const TrainState& state, const LoopOptions& options);
TrainState load_training_state(const std::filesystem::path& path, model::MaskCtModel& model);

}  // namespace maskct::train
