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

#include "maskct/core/parameters.hpp"

#include <stdexcept>

namespace maskct {

ParamId ParameterSet::add(std::string name, Matrix value, bool trainable) {
  if (index_.count(name) != 0) throw std::invalid_argument("duplicate parameter name: " + name);
  const ParamId id = params_.size();
  index_.emplace(name, id);
  params_.push_back(Parameter{std::move(name), std::move(value), trainable});
  return id;
}

std::optional<ParamId> ParameterSet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ParameterSet::scalar_count(std::string_view prefix, bool trainable_only) const {
  std::size_t total = 0;
  for (const auto& p : params_) {
    if (trainable_only && !p.trainable) continue;
    if (std::string_view(p.name).substr(0, prefix.size()) != prefix) continue;
    total += static_cast<std::size_t>(p.value.size());
  }
  return total;
}

GradientSet::GradientSet(const ParameterSet& params) {
  grads_.reserve(params.size());
  for (const auto& p : params) grads_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
}

void GradientSet::zero() {
  for (auto& g : grads_) g.setZero();
}

void GradientSet::add(const GradientSet& other) {
  if (other.grads_.size() != grads_.size()) throw std::invalid_argument("gradient set size mismatch");
  for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i] += other.grads_[i];
}

void GradientSet::scale(double factor) {
  for (auto& g : grads_) g *= factor;
}

bool GradientSet::all_finite() const {
  for (const auto& g : grads_)
    if (!g.allFinite()) return false;
  return true;
}

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

}  // namespace maskct
