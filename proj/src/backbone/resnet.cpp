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

#include "maskct/backbone/resnet.hpp"

#include <stdexcept>

namespace maskct::backbone {

std::vector<int> BackboneConfig::blocks_per_stage() const {
  switch (depth) {
    case 18: return {2, 2, 2, 2};
    case 34: return {3, 4, 6, 3};
    case 50: return {3, 4, 6, 3};
    case 101: return {3, 4, 23, 3};
    case 152: return {3, 8, 36, 3};
    default: throw std::invalid_argument("unsupported backbone depth " + std::to_string(depth));
  }
}

void BackboneConfig::validate() const {
  blocks_per_stage();
  if (stages < 1 || stages > 4) throw std::invalid_argument("backbone stages must be in [1, 4]");
  if (base_width < 1) throw std::invalid_argument("backbone base width must be positive");
}

ResidualBlock::ResidualBlock(ParameterSet& ps, const std::string& name, int in_channels, int width, int stride,
                             bool bottleneck, Rng& rng) {
  if (bottleneck) {
    out_channels_ = width * 4;
    convs_.push_back(nn::Conv2d::create(ps, name + ".conv1", in_channels, width, 1, 1, 0, rng));
    norms_.push_back(nn::FrozenBatchNorm::create(ps, name + ".bn1", width));
    convs_.push_back(nn::Conv2d::create(ps, name + ".conv2", width, width, 3, stride, 1, rng));
    norms_.push_back(nn::FrozenBatchNorm::create(ps, name + ".bn2", width));
    convs_.push_back(nn::Conv2d::create(ps, name + ".conv3", width, out_channels_, 1, 1, 0, rng));
    // Zero-initialised last scale: every block starts as an identity map.
    norms_.push_back(nn::FrozenBatchNorm::create(ps, name + ".bn3", out_channels_, 0.0));
  } else {
    out_channels_ = width;
    convs_.push_back(nn::Conv2d::create(ps, name + ".conv1", in_channels, width, 3, stride, 1, rng));
    norms_.push_back(nn::FrozenBatchNorm::create(ps, name + ".bn1", width));
    convs_.push_back(nn::Conv2d::create(ps, name + ".conv2", width, width, 3, 1, 1, rng));
    norms_.push_back(nn::FrozenBatchNorm::create(ps, name + ".bn2", width, 0.0));
  }
  if (stride != 1 || in_channels != out_channels_) {
    down_conv_ = nn::Conv2d::create(ps, name + ".downsample.0", in_channels, out_channels_, 1, stride, 0, rng);
    down_norm_ = nn::FrozenBatchNorm::create(ps, name + ".downsample.1", out_channels_);
  }
}

SpatialTensor ResidualBlock::forward(const ParameterSet& ps, const SpatialTensor& x, Cache* cache) const {
  const std::size_t n = convs_.size();
  if (cache) {
    cache->conv.resize(n);
    cache->norm.resize(n);
    cache->inner_relu.resize(n - 1);
  }
  SpatialTensor y = x;
  for (std::size_t i = 0; i < n; ++i) {
    y = convs_[i].forward(ps, y, cache ? &cache->conv[i] : nullptr);
    y = norms_[i].forward(ps, y, cache ? &cache->norm[i] : nullptr);
    if (i + 1 < n) {
      y.values = nn::relu(y.values);
      if (cache) cache->inner_relu[i] = y.values;
    }
  }
  if (down_conv_) {
    SpatialTensor s = down_conv_->forward(ps, x, cache ? &cache->down_conv : nullptr);
    s = down_norm_->forward(ps, s, cache ? &cache->down_norm : nullptr);
    y.values += s.values;
  } else {
    y.values += x.values;
  }
  y.values = nn::relu(y.values);
  if (cache) cache->output = y.values;
  return y;
}

SpatialTensor ResidualBlock::backward(const ParameterSet& ps, const Cache& cache, const SpatialTensor& dy,
                                      GradientSet& grads) const {
  SpatialTensor d{dy.height, dy.width, nn::relu_backward(cache.output, dy.values)};
  SpatialTensor shortcut = d;
  for (std::size_t k = convs_.size(); k-- > 0;) {
    if (k + 1 < convs_.size()) d.values = nn::relu_backward(cache.inner_relu[k], d.values);
    d = norms_[k].backward(ps, cache.norm[k], d, grads);
    d = convs_[k].backward(ps, cache.conv[k], d, grads);
  }
  if (down_conv_) {
    shortcut = down_norm_->backward(ps, cache.down_norm, shortcut, grads);
    shortcut = down_conv_->backward(ps, cache.down_conv, shortcut, grads);
  }
  d.values += shortcut.values;
  return d;
}

ResNetPrefix::ResNetPrefix(const BackboneConfig& config, ParameterSet& ps, Rng& rng, std::string prefix)
    : config_(config), prefix_(std::move(prefix)) {
  config_.validate();
  const ParamId first = ps.size();
  const int w = config_.base_width;
  stem_conv_ = nn::Conv2d::create(ps, prefix_ + ".conv1", 3, w, 7, 2, 3, rng);
  stem_norm_ = nn::FrozenBatchNorm::create(ps, prefix_ + ".bn1", w);
  const auto blocks = config_.blocks_per_stage();
  int channels = w;
  for (int s = 0; s < config_.stages; ++s) {
    const int width = w << s;
    for (int b = 0; b < blocks[static_cast<std::size_t>(s)]; ++b) {
      const int stride = (s > 0 && b == 0) ? 2 : 1;
      const std::string name = prefix_ + ".layer" + std::to_string(s + 1) + "." + std::to_string(b);
      blocks_.emplace_back(ps, name, channels, width, stride, config_.bottleneck(), rng);
      channels = blocks_.back().out_channels();
    }
  }
  for (ParamId id = first; id < ps.size(); ++id) ids_.push_back(id);
}

SpatialTensor ResNetPrefix::forward(const ParameterSet& ps, const SpatialTensor& input, Cache* cache) const {
  if (cache) cache->blocks.resize(blocks_.size());
  SpatialTensor x = stem_conv_.forward(ps, input, cache ? &cache->stem_conv : nullptr);
  x = stem_norm_.forward(ps, x, cache ? &cache->stem_norm : nullptr);
  x.values = nn::relu(x.values);
  if (cache) cache->stem_relu = x.values;
  x = pool_.forward(x, cache ? &cache->pool : nullptr);
  for (std::size_t i = 0; i < blocks_.size(); ++i) x = blocks_[i].forward(ps, x, cache ? &cache->blocks[i] : nullptr);
  return x;
}

void ResNetPrefix::backward(const ParameterSet& ps, const Cache& cache, const SpatialTensor& dy,
                            GradientSet& grads) const {
  SpatialTensor d = dy;
  for (std::size_t i = blocks_.size(); i-- > 0;) d = blocks_[i].backward(ps, cache.blocks[i], d, grads);
  d = pool_.backward(cache.pool, d);
  d.values = nn::relu_backward(cache.stem_relu, d.values);
  d = stem_norm_.backward(ps, cache.stem_norm, d, grads);
  stem_conv_.backward(ps, cache.stem_conv, d, grads, /*input_grad=*/false);
}

}  // namespace maskct::backbone
