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
#include <span>

#include <Eigen/Dense>

namespace maskct::train {

// log(1 + e^x) without overflow.
double softplus(double x);

struct LossResult {
  double value = 0.0;
  Eigen::VectorXd grad;  // dL/dlogits
};

// Mean binary cross-entropy over the selected classes, computed from logits:
//   L = (1/C) sum_i [ y_i softplus(-x_i) + (1 - y_i) softplus(x_i) ]
// with gradient (sigmoid(x_i) - y_i) / C. `include` (0/1 per class) selects
// the classes that contribute; empty means every class.
LossResult bce_loss(const Eigen::VectorXd& logits, std::span<const std::uint8_t> targets,
                    std::span<const std::uint8_t> include = {});

}  // namespace maskct::train
