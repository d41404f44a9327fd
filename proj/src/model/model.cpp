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

#include "maskct/model/model.hpp"

#include <stdexcept>

#include "maskct/core/error.hpp"

namespace maskct::model {

void ModelConfig::validate() const {
  wfe.validate();
  encoder.validate();
  if (num_labels < 1) throw std::invalid_argument("model needs at least one label");
  if (fd_kernel < 1 || fd_kernel % 2 == 0) throw std::invalid_argument("fd_kernel must be odd");
  if (classifier_dropout < 0.0 || classifier_dropout >= 1.0)
    throw std::invalid_argument("classifier dropout must be in [0, 1)");
}

nlohmann::ordered_json ModelConfig::to_json() const {
  return {{"backbone_depth", wfe.backbone.depth},
          {"backbone_stages", wfe.backbone.stages},
          {"backbone_width", wfe.backbone.base_width},
          {"input_size", wfe.input_size},
          {"d_model", encoder.d_model},
          {"heads", encoder.heads},
          {"layers", encoder.layers},
          {"ffn_width", encoder.ffn_width},
          {"ffn_dropout", encoder.ffn_dropout},
          {"num_labels", num_labels},
          {"fd_kernel", fd_kernel},
          {"classifier_dropout", classifier_dropout},
          {"positional_embedding", positional_embedding},
          {"freeze_backbone", freeze_backbone}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.wfe.backbone.depth = j.at("backbone_depth").get<int>();
  c.wfe.backbone.stages = j.at("backbone_stages").get<int>();
  c.wfe.backbone.base_width = j.at("backbone_width").get<int>();
  c.wfe.input_size = j.at("input_size").get<int>();
  c.encoder.d_model = j.at("d_model").get<int>();
  c.encoder.heads = j.at("heads").get<int>();
  c.encoder.layers = j.at("layers").get<int>();
  c.encoder.ffn_width = j.at("ffn_width").get<int>();
  c.encoder.ffn_dropout = j.at("ffn_dropout").get<double>();
  c.num_labels = j.at("num_labels").get<int>();
  c.fd_kernel = j.at("fd_kernel").get<int>();
  c.classifier_dropout = j.at("classifier_dropout").get<double>();
  c.positional_embedding = j.at("positional_embedding").get<bool>();
  c.freeze_backbone = j.at("freeze_backbone").get<bool>();
  return c;
}

MaskCtModel::MaskCtModel(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng = make_rng(seed, {0x5eed});
  extractor_.emplace(config_.wfe, params_, rng);
  backbone_end_ = params_.size();
  const int d = config_.encoder.d_model;
  embedding_ = backbone::FeatureEmbedding(params_, "embed.features", config_.wfe.backbone.out_channels(), d, rng);
  if (config_.positional_embedding)
    positions_ = params_.add("embed.positions", normal_matrix(config_.wfe.tokens(), d, 0.02, rng));
  label_tables_ = labels::LabelTables::create(params_, "labels", config_.num_labels, d, rng);
  discovery_ = encoder::FeatureDiscovery::create(params_, "discovery", config_.fd_kernel, rng);
  encoder_ = encoder::EncoderArray(params_, "encoder", config_.encoder, rng);
  head_ = encoder::ClassifierHead::create(params_, "head", d, config_.classifier_dropout, rng);
}

bool MaskCtModel::is_backbone_parameter(ParamId id) const { return id < backbone_end_; }

bool MaskCtModel::is_optimized(ParamId id) const {
  if (!params_.at(id).trainable) return false;
  return !(config_.freeze_backbone && is_backbone_parameter(id));
}

encoder::EncoderSequence MaskCtModel::input_sequence(const backbone::FeatureMap& map,
                                                     const labels::LabelStateVector& lsv) const {
  if (static_cast<int>(lsv.size()) != config_.num_labels)
    throw std::invalid_argument("label state vector has " + std::to_string(lsv.size()) + " entries, model expects " +
                                std::to_string(config_.num_labels));
  Matrix features = embedding_.forward(params_, map).tokens;
  Matrix ls = label_tables_.forward(params_, lsv);
  RowVector fd = discovery_.forward(params_, features, ls, nullptr);
  if (positions_) {
    if (features.rows() != params_[*positions_].rows())
      throw std::invalid_argument("feature token count does not match the positional table");
    features += params_[*positions_];
  }
  return encoder::assemble_sequence(features, fd, ls);
}

Eigen::VectorXd MaskCtModel::forward_from_features(const backbone::FeatureMap& map, const labels::LabelStateVector& lsv,
                                                   ForwardCache* cache, Rng* dropout_rng) const {
  if (static_cast<int>(lsv.size()) != config_.num_labels)
    throw std::invalid_argument("label state vector has " + std::to_string(lsv.size()) + " entries, model expects " +
                                std::to_string(config_.num_labels));
  Matrix features = embedding_.forward(params_, map).tokens;
  Matrix ls = label_tables_.forward(params_, lsv);
  RowVector fd = discovery_.forward(params_, features, ls, cache ? &cache->discovery : nullptr);
  if (positions_) {
    if (features.rows() != params_[*positions_].rows())
      throw std::invalid_argument("feature token count does not match the positional table");
    features += params_[*positions_];
  }
  encoder::EncoderSequence seq = encoder::assemble_sequence(features, fd, ls);
  Matrix out = encoder_.forward(params_, seq.tokens, cache ? &cache->encoder : nullptr, dropout_rng);
  Matrix label_out = out.middleRows(seq.layout.label_row(0), seq.layout.labels);
  Eigen::VectorXd logits = head_.forward(params_, label_out, cache ? &cache->head : nullptr, dropout_rng);
  if (!logits.allFinite()) throw NumericalError("model produced non-finite logits");
  if (cache) {
    cache->map = map;
    cache->lsv = lsv;
    cache->label_states = std::move(ls);
  }
  return logits;
}

Eigen::VectorXd MaskCtModel::forward(const ImagePlane& img, const labels::LabelStateVector& lsv, ForwardCache* cache,
                                     Rng* dropout_rng) const {
  backbone::FeatureMap map = extractor_->extract(params_, img, cache ? &cache->backbone : nullptr);
  if (cache) cache->has_backbone = true;
  return forward_from_features(map, lsv, cache, dropout_rng);
}

Eigen::VectorXd MaskCtModel::predict_proba(const ImagePlane& img, const labels::LabelStateVector& lsv) const {
  return encoder::sigmoid(forward(img, lsv));
}

encoder::EncoderSequence MaskCtModel::encode(const ImagePlane& img, const labels::LabelStateVector& lsv) const {
  encoder::EncoderSequence seq = input_sequence(extractor_->extract(params_, img), lsv);
  seq.tokens = encoder_.forward(params_, seq.tokens, nullptr, nullptr);
  return seq;
}

void MaskCtModel::backward(const ForwardCache& cache, const Eigen::VectorXd& dlogits, GradientSet& grads) const {
  const Eigen::Index features = cache.map.values.rows();
  const Eigen::Index labels = static_cast<Eigen::Index>(cache.lsv.size());
  Matrix dlabel_out = head_.backward(params_, cache.head, dlogits, grads);
  Matrix dout = Matrix::Zero(features + 1 + labels, config_.encoder.d_model);
  dout.bottomRows(labels) = dlabel_out;
  Matrix dseq = encoder_.backward(params_, cache.encoder, dout, grads);

  Matrix dfeatures = dseq.topRows(features);
  if (positions_) grads[*positions_] += dfeatures;
  auto fd_grads = discovery_.backward(params_, cache.discovery, dseq.row(features), grads);
  dfeatures += fd_grads.features;
  Matrix dls = dseq.bottomRows(labels) + fd_grads.labels;
  label_tables_.backward(cache.lsv, dls, grads);

  Matrix dmap = embedding_.backward(params_, cache.map, dfeatures, grads);
  if (cache.has_backbone && !config_.freeze_backbone) extractor_->backward(params_, cache.backbone, dmap, grads);
}

}  // namespace maskct::model
