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
#include <functional>
#include <optional>
#include <vector>

#include "maskct/core/parameters.hpp"

namespace maskct::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moments are kept for every parameter; the
// `update` predicate decides which parameters move on a step.
class Adam {
 public:
  Adam() = default;
  Adam(const ParameterSet& params, AdamConfig config);

  void step(ParameterSet& params, const GradientSet& grads, double lr, const std::function<bool(ParamId)>& update);

  std::int64_t steps() const { return steps_; }
  void set_steps(std::int64_t steps) { steps_ = steps; }
  const AdamConfig& config() const { return config_; }
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

 private:
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::int64_t steps_ = 0;
};

struct PlateauConfig {
  double factor = 0.1;
  int patience = 3;
  double min_delta = 0.0;  // improvement must exceed best + min_delta
  double min_lr = 0.0;
};

// Reduce-on-plateau in "max" mode. After `patience` consecutive epochs without
// improvement the learning rate is multiplied by `factor` and the count resets.
class PlateauScheduler {
 public:
  PlateauScheduler() = default;
  PlateauScheduler(double lr, PlateauConfig config);

  // Feeds one epoch's metric; returns true when the learning rate was reduced.
  bool step(double metric);

  double lr() const { return lr_; }
  std::optional<double> best() const { return best_; }
  int bad_epochs() const { return bad_epochs_; }
  const PlateauConfig& config() const { return config_; }
  void restore(double lr, std::optional<double> best, int bad_epochs);

 private:
  PlateauConfig config_;
  double lr_ = 0.0;
  std::optional<double> best_;
  int bad_epochs_ = 0;
};

}  // namespace maskct::train
