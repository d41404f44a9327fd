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

#include "maskct/encoder/attention.hpp"

#include <cmath>
#include <stdexcept>

#include "maskct/core/error.hpp"

namespace maskct::encoder {

Matrix attention_weights(const Matrix& queries, const Matrix& keys) {
  if (queries.cols() != keys.cols()) throw std::invalid_argument("query/key width mismatch");
  if (!queries.allFinite() || !keys.allFinite()) throw NumericalError("attention input contains NaN or Inf");
  const double scale = 1.0 / std::sqrt(static_cast<double>(queries.cols()));
  Matrix scores = (queries * keys.transpose()) * scale;
  return nn::softmax_rows(scores);
}

MultiHeadAttention MultiHeadAttention::create(ParameterSet& ps, const std::string& name, int d_model, int heads,
                                              Rng& rng) {
  if (heads <= 0 || d_model % heads != 0)
    throw std::invalid_argument("d_model " + std::to_string(d_model) + " is not divisible by " +
                                std::to_string(heads) + " heads");
  MultiHeadAttention mha;
  mha.d_model = d_model;
  mha.heads = heads;
  mha.query = nn::Linear::create(ps, name + ".q_proj", d_model, d_model, rng, false);
  mha.key = nn::Linear::create(ps, name + ".k_proj", d_model, d_model, rng, false);
  mha.value = nn::Linear::create(ps, name + ".v_proj", d_model, d_model, rng, false);
  mha.output = nn::Linear::create(ps, name + ".out_proj", d_model, d_model, rng);
  return mha;
}

Matrix MultiHeadAttention::forward(const ParameterSet& ps, const Matrix& x, Cache* cache) const {
  if (!x.allFinite()) throw NumericalError("attention input contains NaN or Inf");
  Matrix q = query.forward(ps, x);
  Matrix k = key.forward(ps, x);
  Matrix v = value.forward(ps, x);
  const int dk = head_dim();
  Matrix merged(x.rows(), d_model);
  std::vector<Matrix> weights;
  weights.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    Matrix a = attention_weights(q.middleCols(h * dk, dk), k.middleCols(h * dk, dk));
    merged.middleCols(h * dk, dk).noalias() = a * v.middleCols(h * dk, dk);
    weights.push_back(std::move(a));
  }
  Matrix y = output.forward(ps, merged);
  if (cache) {
    cache->input = x;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->weights = std::move(weights);
    cache->merged = std::move(merged);
  }
  return y;
}

Matrix MultiHeadAttention::backward(const ParameterSet& ps, const Cache& c, const Matrix& dy,
                                    GradientSet& grads) const {
  Matrix dmerged = output.backward(ps, c.merged, dy, grads);
  const int dk = head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Matrix dq(dy.rows(), d_model), dkey(dy.rows(), d_model), dv(dy.rows(), d_model);
  for (int h = 0; h < heads; ++h) {
    const Matrix& a = c.weights[static_cast<std::size_t>(h)];
    const auto d_out = dmerged.middleCols(h * dk, dk);
    Matrix da = d_out * c.v.middleCols(h * dk, dk).transpose();
    dv.middleCols(h * dk, dk).noalias() = a.transpose() * d_out;
    Eigen::VectorXd row_dot = (a.array() * da.array()).rowwise().sum();
    Matrix dscores = (a.array() * (da.colwise() - row_dot).array()).matrix() * scale;
    dq.middleCols(h * dk, dk).noalias() = dscores * c.k.middleCols(h * dk, dk);
    dkey.middleCols(h * dk, dk).noalias() = dscores.transpose() * c.q.middleCols(h * dk, dk);
  }
  Matrix dx = query.backward(ps, c.input, dq, grads);
  dx += key.backward(ps, c.input, dkey, grads);
  dx += value.backward(ps, c.input, dv, grads);
  return dx;
}

Matrix MultiHeadAttention::head_weights(const ParameterSet& ps, const Matrix& x, int head) const {
  if (head < 0 || head >= heads) throw std::out_of_range("attention head index out of range");
  const int dk = head_dim();
  Matrix q = query.forward(ps, x);
  Matrix k = key.forward(ps, x);
  return attention_weights(q.middleCols(head * dk, dk), k.middleCols(head * dk, dk));
}

}  // namespace maskct::encoder
