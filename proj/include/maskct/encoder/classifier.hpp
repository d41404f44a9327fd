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

#include <string>

#include "maskct/nn/layers.hpp"

namespace maskct::encoder {

double sigmoid(double x);
Eigen::VectorXd sigmoid(const Eigen::VectorXd& logits);

// One shared linear unit applied to every label token: logit_i = LS'_i . w + b.
// Dropout acts on the label tokens before the projection during training.
struct ClassifierHead {
  nn::Linear linear;
  nn::Dropout dropout;

  struct Cache {
    Matrix input;
    Matrix mask;  // empty when dropout was not applied
  };

  static ClassifierHead create(ParameterSet& ps, const std::string& name, int d_model, double dropout, Rng& rng);
  Eigen::VectorXd forward(const ParameterSet& ps, const Matrix& label_tokens, Cache* cache, Rng* rng) const;
  Matrix backward(const ParameterSet& ps, const Cache& cache, const Eigen::VectorXd& dlogits, GradientSet& grads) const;
};

}  // namespace maskct::encoder
