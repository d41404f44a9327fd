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

#include "maskct/encoder/encoder_layer.hpp"

#include <cmath>
#include <stdexcept>

namespace maskct::encoder {

void EncoderConfig::validate() const {
  if (d_model <= 0 || heads <= 0 || layers < 0 || ffn_width <= 0)
    throw std::invalid_argument("encoder dimensions must be positive");
  if (d_model % heads != 0) throw std::invalid_argument("d_model must be divisible by the head count");
  if (ffn_dropout < 0.0 || ffn_dropout >= 1.0) throw std::invalid_argument("ffn dropout must be in [0, 1)");
}

Matrix FeedForward::forward(const ParameterSet& ps, const Matrix& x, Cache* cache, Rng* rng) const {
  Matrix hidden = nn::relu(expand.forward(ps, x));
  Matrix mask;
  Matrix dropped;
  if (rng && dropout.rate > 0.0) {
    mask = dropout.sample_mask(hidden.rows(), hidden.cols(), *rng);
    dropped = hidden.cwiseProduct(mask);
  } else {
    dropped = hidden;
  }
  Matrix y = contract.forward(ps, dropped);
  if (cache) {
    cache->input = x;
    cache->hidden = std::move(hidden);
    cache->mask = std::move(mask);
    cache->dropped = std::move(dropped);
  }
  return y;
}

Matrix FeedForward::backward(const ParameterSet& ps, const Cache& c, const Matrix& dy, GradientSet& grads) const {
  Matrix d = contract.backward(ps, c.dropped, dy, grads);
  if (c.mask.size() != 0) d = d.cwiseProduct(c.mask);
  d = nn::relu_backward(c.hidden, d);
  return expand.backward(ps, c.input, d, grads);
}

EncoderLayer EncoderLayer::create(ParameterSet& ps, const std::string& name, const EncoderConfig& config, Rng& rng) {
  EncoderLayer layer;
  layer.attn_norm = nn::LayerNorm::create(ps, name + ".attn_norm", config.d_model);
  layer.attention = MultiHeadAttention::create(ps, name + ".attn", config.d_model, config.heads, rng);
  layer.ffn_norm = nn::LayerNorm::create(ps, name + ".ffn_norm", config.d_model);
  layer.ffn.expand = nn::Linear::create(ps, name + ".ffn.expand", config.d_model, config.ffn_width, rng);
  layer.ffn.contract = nn::Linear::create(ps, name + ".ffn.contract", config.ffn_width, config.d_model, rng);
  layer.ffn.dropout.rate = config.ffn_dropout;
  return layer;
}

Matrix EncoderLayer::forward(const ParameterSet& ps, const Matrix& x, Cache* cache, Rng* rng) const {
  Matrix h = x + attention.forward(ps, attn_norm.forward(ps, x, cache ? &cache->attn_norm : nullptr),
                                   cache ? &cache->attention : nullptr);
  Matrix f = ffn.forward(ps, ffn_norm.forward(ps, h, cache ? &cache->ffn_norm : nullptr),
                         cache ? &cache->ffn : nullptr, rng);
  return h + f;
}

Matrix EncoderLayer::backward(const ParameterSet& ps, const Cache& c, const Matrix& dy, GradientSet& grads) const {
  Matrix dh = dy + ffn_norm.backward(ps, c.ffn_norm, ffn.backward(ps, c.ffn, dy, grads), grads);
  return dh + attn_norm.backward(ps, c.attn_norm, attention.backward(ps, c.attention, dh, grads), grads);
}

EncoderArray::EncoderArray(ParameterSet& ps, const std::string& name, const EncoderConfig& config, Rng& rng) {
  config.validate();
  for (int i = 0; i < config.layers; ++i)
    layers_.push_back(EncoderLayer::create(ps, name + ".layers." + std::to_string(i), config, rng));
}

Matrix EncoderArray::forward(const ParameterSet& ps, const Matrix& x, Cache* cache, Rng* rng) const {
  if (cache) cache->resize(layers_.size());
  Matrix h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) h = layers_[i].forward(ps, h, cache ? &(*cache)[i] : nullptr, rng);
  return h;
}

Matrix EncoderArray::backward(const ParameterSet& ps, const Cache& cache, const Matrix& dy, GradientSet& grads) const {
  Matrix d = dy;
  for (std::size_t i = layers_.size(); i-- > 0;) d = layers_[i].backward(ps, cache[i], d, grads);
  return d;
}

}  // namespace maskct::encoder
