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

#include "maskct/train/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "maskct/core/error.hpp"
#include "maskct/encoder/classifier.hpp"

namespace maskct::train {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

LossResult bce_loss(const Eigen::VectorXd& logits, std::span<const std::uint8_t> targets,
                    std::span<const std::uint8_t> include) {
  const auto n = static_cast<std::size_t>(logits.size());
  if (targets.size() != n) throw std::invalid_argument("target count does not match logit count");
  if (!include.empty() && include.size() != n) throw std::invalid_argument("include mask does not match logit count");
  LossResult r;
  r.grad = Eigen::VectorXd::Zero(logits.size());
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i] > 1) throw std::invalid_argument("BCE targets must be 0 or 1");
    if (!std::isfinite(logits[i])) throw NumericalError("non-finite logit at class " + std::to_string(i));
    if (include.empty() || include[i]) ++count;
  }
  if (count == 0) return r;
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < n; ++i) {
    if (!include.empty() && !include[i]) continue;
    const double x = logits[i];
    const double y = targets[i];
    r.value += y * softplus(-x) + (1.0 - y) * softplus(x);
    r.grad[i] = (encoder::sigmoid(x) - y) * inv;
  }
  r.value *= inv;
  return r;
}

}  // namespace maskct::train
