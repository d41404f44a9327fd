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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maskct/core/parameters.hpp"
#include "maskct/core/rng.hpp"

namespace maskct::labels {

// Ordered class names; the order fixes the embedding row of each class.
class LabelVocabulary {
 public:
  LabelVocabulary() = default;
  explicit LabelVocabulary(std::vector<std::string> names);

  // Plain text, one class per line. Blank lines and '#' comments are skipped.
  static LabelVocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(const std::string& name) const;

  bool operator==(const LabelVocabulary&) const = default;

 private:
  std::vector<std::string> names_;
};

enum class LabelState : std::uint8_t { Masked = 0, KnownPositive = 1, KnownNegative = 2 };
inline constexpr int kStateCount = 3;

const char* to_string(LabelState s);

struct LabelStateVector {
  std::vector<std::uint8_t> truth;  // 0/1 per class; unused for Masked rows downstream
  std::vector<LabelState> state;

  std::size_t size() const { return state.size(); }
  std::size_t masked_count() const;
  // Known states must agree with truth.
  void validate() const;
};

// round-half-up(ratio * n)
std::size_t masked_count_for(double ratio, std::size_t n);

// Masks round(ratio * N) classes chosen uniformly without replacement; the
// rest become KnownPositive / KnownNegative according to truth.
LabelStateVector sample_mask(std::span<const std::uint8_t> truth, double ratio, Rng& rng);

// Inference configuration: every class Masked.
LabelStateVector all_masked(std::size_t n);

// All Masked except the pinned classes, which become Known with the given value.
LabelStateVector with_evidence(std::size_t n, const std::map<std::size_t, bool>& pinned);

// LS_i = label_table[i] + state_table[state_i].
Matrix embed_label_states(const LabelStateVector& lsv, const Matrix& label_table, const Matrix& state_table);

// Learned label and state tables (N x d and 3 x d).
struct LabelTables {
  ParamId labels = 0;
  ParamId states = 0;

  static LabelTables create(ParameterSet& ps, const std::string& name, int count, int d_model, Rng& rng);
  Matrix forward(const ParameterSet& ps, const LabelStateVector& lsv) const;
  void backward(const LabelStateVector& lsv, const Matrix& dembed, GradientSet& grads) const;
};

}  // namespace maskct::labels
