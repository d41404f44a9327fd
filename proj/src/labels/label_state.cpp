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

#include "maskct/labels/label_state.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "maskct/core/error.hpp"

namespace maskct::labels {

LabelVocabulary::LabelVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw std::invalid_argument("label vocabulary must not be empty");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw std::invalid_argument("empty label name");
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate label name: " + n);
  }
}

LabelVocabulary LabelVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    names.push_back(line.substr(first, last - first + 1));
  }
  try {
    return LabelVocabulary(std::move(names));
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void LabelVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write vocabulary file: " + path.string());
  for (const auto& n : names_) out << n << '\n';
}

std::optional<std::size_t> LabelVocabulary::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

const char* to_string(LabelState s) {
  switch (s) {
    case LabelState::Masked: return "masked";
    case LabelState::KnownPositive: return "known_positive";
    case LabelState::KnownNegative: return "known_negative";
  }
  return "unknown";
}

std::size_t LabelStateVector::masked_count() const {
  return static_cast<std::size_t>(std::count(state.begin(), state.end(), LabelState::Masked));
}

void LabelStateVector::validate() const {
  if (truth.size() != state.size()) throw std::invalid_argument("label state vector length mismatch");
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == LabelState::KnownPositive && truth[i] != 1)
      throw std::invalid_argument("KnownPositive label with truth 0 at index " + std::to_string(i));
    if (state[i] == LabelState::KnownNegative && truth[i] != 0)
      throw std::invalid_argument("KnownNegative label with truth 1 at index " + std::to_string(i));
  }
}

std::size_t masked_count_for(double ratio, std::size_t n) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("mask ratio must be in [0, 1]");
  return std::min(n, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5)));
}

LabelStateVector sample_mask(std::span<const std::uint8_t> truth, double ratio, Rng& rng) {
  const std::size_t n = truth.size();
  const std::size_t k = masked_count_for(ratio, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  LabelStateVector lsv;
  lsv.truth.assign(truth.begin(), truth.end());
  lsv.state.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] > 1) throw std::invalid_argument("truth values must be 0 or 1");
    lsv.state[i] = truth[i] ? LabelState::KnownPositive : LabelState::KnownNegative;
  }
  for (std::size_t j = 0; j < k; ++j) lsv.state[order[j]] = LabelState::Masked;
  return lsv;
}

LabelStateVector all_masked(std::size_t n) {
  return LabelStateVector{std::vector<std::uint8_t>(n, 0), std::vector<LabelState>(n, LabelState::Masked)};
}

LabelStateVector with_evidence(std::size_t n, const std::map<std::size_t, bool>& pinned) {
  LabelStateVector lsv = all_masked(n);
  for (const auto& [idx, value] : pinned) {
    if (idx >= n) throw std::out_of_range("pinned label index out of range");
    lsv.truth[idx] = value ? 1 : 0;
    lsv.state[idx] = value ? LabelState::KnownPositive : LabelState::KnownNegative;
  }
  return lsv;
}

Matrix embed_label_states(const LabelStateVector& lsv, const Matrix& label_table, const Matrix& state_table) {
  if (static_cast<std::size_t>(label_table.rows()) != lsv.size())
    throw std::invalid_argument("label table has " + std::to_string(label_table.rows()) + " rows for " +
                                std::to_string(lsv.size()) + " labels");
  if (state_table.rows() != kStateCount || state_table.cols() != label_table.cols())
    throw std::invalid_argument("state table must be 3 x d_model");
  Matrix out = label_table;
  for (std::size_t i = 0; i < lsv.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) += state_table.row(static_cast<int>(lsv.state[i]));
  return out;
}

LabelTables LabelTables::create(ParameterSet& ps, const std::string& name, int count, int d_model, Rng& rng) {
  LabelTables t;
  t.labels = ps.add(name + ".label_embedding", normal_matrix(count, d_model, 0.02, rng));
  t.states = ps.add(name + ".state_embedding", normal_matrix(kStateCount, d_model, 0.02, rng));
  return t;
}

Matrix LabelTables::forward(const ParameterSet& ps, const LabelStateVector& lsv) const {
  return embed_label_states(lsv, ps[labels], ps[states]);
}

void LabelTables::backward(const LabelStateVector& lsv, const Matrix& dembed, GradientSet& grads) const {
  grads[labels] += dembed;
  for (std::size_t i = 0; i < lsv.size(); ++i)
    grads[states].row(static_cast<int>(lsv.state[i])) += dembed.row(static_cast<Eigen::Index>(i));
}

}  // namespace maskct::labels
