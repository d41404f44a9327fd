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

#include "maskct/train/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "maskct/core/error.hpp"

namespace maskct::train {

Adam::Adam(const ParameterSet& params, AdamConfig config) : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
}

void Adam::step(ParameterSet& params, const GradientSet& grads, double lr, const std::function<bool(ParamId)>& update) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("optimizer state does not match the parameter set");
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (ParamId id = 0; id < params.size(); ++id) {
    if (!update(id)) continue;
    const Matrix& g = grads[id];
    m_[id] = b1 * m_[id] + (1.0 - b1) * g;
    v_[id] = b2 * v_[id] + (1.0 - b2) * g.cwiseProduct(g);
    params[id].array() -= lr * (m_[id].array() / c1) / ((v_[id].array() / c2).sqrt() + config_.epsilon);
  }
}

PlateauScheduler::PlateauScheduler(double lr, PlateauConfig config) : config_(config), lr_(lr) {
  if (!(config.factor > 0.0 && config.factor < 1.0)) throw std::invalid_argument("plateau factor must be in (0, 1)");
  if (config.patience < 1) throw std::invalid_argument("plateau patience must be at least 1");
}

bool PlateauScheduler::step(double metric) {
  if (!std::isfinite(metric)) throw NumericalError("monitored metric is not finite");
  if (!best_ || metric > *best_ + config_.min_delta) {
    best_ = metric;
    bad_epochs_ = 0;
    return false;
  }
  if (++bad_epochs_ < config_.patience) return false;
  bad_epochs_ = 0;
  const double next = std::max(lr_ * config_.factor, config_.min_lr);
  const bool reduced = next < lr_;
  lr_ = std::min(lr_, next);
  return reduced;
}

void PlateauScheduler::restore(double lr, std::optional<double> best, int bad_epochs) {
  lr_ = lr;
  best_ = best;
  bad_epochs_ = bad_epochs;
}

}  // namespace maskct::train
