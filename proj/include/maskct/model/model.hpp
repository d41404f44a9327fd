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
#include <optional>
#include <vector>

#include <json.hpp>

#include "maskct/backbone/extractor.hpp"
#include "maskct/encoder/classifier.hpp"
#include "maskct/encoder/encoder_layer.hpp"
#include "maskct/encoder/feature_discovery.hpp"
#include "maskct/encoder/sequence.hpp"
#include "maskct/labels/label_state.hpp"

namespace maskct::model {

struct ModelConfig {
  backbone::WfeConfig wfe;
  encoder::EncoderConfig encoder;
  int num_labels = 5;
  int fd_kernel = 3;
  double classifier_dropout = 0.35;
  bool positional_embedding = true;
  bool freeze_backbone = false;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

struct ForwardCache {
  bool has_backbone = false;
  backbone::WeatherFeatureExtractor::Cache backbone;
  backbone::FeatureMap map;
  labels::LabelStateVector lsv;
  Matrix label_states;
  encoder::FeatureDiscovery::Cache discovery;
  encoder::EncoderArray::Cache encoder;
  encoder::ClassifierHead::Cache head;
};

// Image -> truncated CNN -> feature tokens (+ positions) | FD token | label-state
// tokens -> encoder array -> shared sigmoid head over the label tokens.
class MaskCtModel {
 public:
  MaskCtModel(const ModelConfig& config, std::uint64_t seed);

  // Logits, one per class. `dropout_rng` enables training-mode dropout.
  Eigen::VectorXd forward(const ImagePlane& img, const labels::LabelStateVector& lsv, ForwardCache* cache = nullptr,
                          Rng* dropout_rng = nullptr) const;
  Eigen::VectorXd forward_from_features(const backbone::FeatureMap& map, const labels::LabelStateVector& lsv,
                                        ForwardCache* cache = nullptr, Rng* dropout_rng = nullptr) const;
  Eigen::VectorXd predict_proba(const ImagePlane& img, const labels::LabelStateVector& lsv) const;

  // Encoder input sequence H and, after the array, H'.
  encoder::EncoderSequence input_sequence(const backbone::FeatureMap& map, const labels::LabelStateVector& lsv) const;
  encoder::EncoderSequence encode(const ImagePlane& img, const labels::LabelStateVector& lsv) const;

  // Accumulates dL/dparams given dL/dlogits. Backbone gradients are skipped when frozen.
  void backward(const ForwardCache& cache, const Eigen::VectorXd& dlogits, GradientSet& grads) const;

  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }
  const ModelConfig& config() const { return config_; }
  const backbone::WeatherFeatureExtractor& extractor() const { return *extractor_; }
  const encoder::EncoderArray& encoder() const { return encoder_; }
  const labels::LabelTables& label_tables() const { return label_tables_; }
  const encoder::FeatureDiscovery& discovery() const { return discovery_; }
  const encoder::ClassifierHead& head() const { return head_; }
  bool is_backbone_parameter(ParamId id) const;
  // Parameters the optimizer may update (trainable, and not frozen backbone).
  bool is_optimized(ParamId id) const;

 private:
  ModelConfig config_;
  ParameterSet params_;
  std::optional<backbone::WeatherFeatureExtractor> extractor_;
  backbone::FeatureEmbedding embedding_;
  std::optional<ParamId> positions_;
  labels::LabelTables label_tables_;
  encoder::FeatureDiscovery discovery_;
  encoder::EncoderArray encoder_;
  encoder::ClassifierHead head_;
  ParamId backbone_end_ = 0;
};

}  // namespace maskct::model
