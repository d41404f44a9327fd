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

#include <stdexcept>

#include "maskct/core/tensor.hpp"

namespace maskct::encoder {

// Row layout of the encoder input: [feature tokens | FD | label tokens].
struct SequenceLayout {
  Eigen::Index features = 0;
  Eigen::Index discovery = 1;
  Eigen::Index labels = 0;

  Eigen::Index rows() const { return features + discovery + labels; }
  Eigen::Index feature_row(Eigen::Index i) const { return i; }
  Eigen::Index discovery_row() const { return features; }
  Eigen::Index label_row(Eigen::Index i) const { return features + discovery + i; }
};

struct EncoderSequence {
  Matrix tokens;
  SequenceLayout layout;

  auto label_tokens() const { return tokens.middleRows(layout.label_row(0), layout.labels); }
  auto feature_tokens() const { return tokens.topRows(layout.features); }
};

inline EncoderSequence assemble_sequence(const Matrix& features, const RowVector& discovery, const Matrix& labels) {
  if (features.cols() != discovery.cols() || labels.cols() != features.cols())
    throw std::invalid_argument("encoder sequence parts must share d_model");
  EncoderSequence seq;
  seq.layout = SequenceLayout{features.rows(), 1, labels.rows()};
  seq.tokens.resize(seq.layout.rows(), features.cols());
  seq.tokens.topRows(features.rows()) = features;
  seq.tokens.row(seq.layout.discovery_row()) = discovery;
  seq.tokens.bottomRows(labels.rows()) = labels;
  return seq;
}

}  // namespace maskct::encoder
