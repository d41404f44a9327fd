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
#include <vector>

#include "maskct/nn/layers.hpp"

namespace maskct::encoder {

// softmax(Q K^T / sqrt(d_k)), one row per query. Rows sum to one.
Matrix attention_weights(const Matrix& queries, const Matrix& keys);

// Multi-head self-attention: per-head weights from bias-free Q/K/V projections,
// head outputs concatenated and passed through an output projection.
struct MultiHeadAttention {
  nn::Linear query;
  nn::Linear key;
  nn::Linear value;
  nn::Linear output;
  int d_model = 0;
  int heads = 1;

  struct Cache {
    Matrix input;
    Matrix q, k, v;
    std::vector<Matrix> weights;  // one M x M matrix per head
    Matrix merged;                // concatenated head outputs, M x d_model
  };

  static MultiHeadAttention create(ParameterSet& ps, const std::string& name, int d_model, int heads, Rng& rng);

  int head_dim() const { return d_model / heads; }
  Matrix forward(const ParameterSet& ps, const Matrix& x, Cache* cache) const;
  Matrix backward(const ParameterSet& ps, const Cache& cache, const Matrix& dy, GradientSet& grads) const;

  // Attention weights of one head over the given tokens.
  Matrix head_weights(const ParameterSet& ps, const Matrix& x, int head) const;
};

}  // namespace maskct::encoder
