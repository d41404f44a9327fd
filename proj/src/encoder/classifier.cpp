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

#include "maskct/encoder/classifier.hpp"

#include <cmath>

namespace maskct::encoder {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& logits) {
  Eigen::VectorXd p(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) p(i) = sigmoid(logits(i));
  return p;
}

ClassifierHead ClassifierHead::create(ParameterSet& ps, const std::string& name, int d_model, double dropout,
                                      Rng& rng) {
  ClassifierHead head;
  head.linear = nn::Linear::create(ps, name, d_model, 1, rng);
  head.dropout.rate = dropout;
  return head;
}

Eigen::VectorXd ClassifierHead::forward(const ParameterSet& ps, const Matrix& label_tokens, Cache* cache,
                                        Rng* rng) const {
  Matrix mask;
  Matrix input = label_tokens;
  if (rng && dropout.rate > 0.0) {
    mask = dropout.sample_mask(input.rows(), input.cols(), *rng);
    input = input.cwiseProduct(mask);
  }
  Eigen::VectorXd logits = linear.forward(ps, input).col(0);
  if (cache) {
    cache->input = std::move(input);
    cache->mask = std::move(mask);
  }
  return logits;
}

Matrix ClassifierHead::backward(const ParameterSet& ps, const Cache& c, const Eigen::VectorXd& dlogits,
                                GradientSet& grads) const {
  Matrix dy = dlogits;
  Matrix dx = linear.backward(ps, c.input, dy, grads);
  if (c.mask.size() != 0) dx = dx.cwiseProduct(c.mask);
  return dx;
}

}  // namespace maskct::encoder
