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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "maskct/core/rng.hpp"
#include "maskct/core/tensor.hpp"

namespace maskct {

using ParamId = std::size_t;

struct Parameter {
  std::string name;
  Matrix value;
  // Buffers (e.g. frozen batch-norm statistics) are stored alongside weights
  // but never receive gradients or optimizer updates.
  bool trainable = true;
};

class ParameterSet {
 public:
  ParamId add(std::string name, Matrix value, bool trainable = true);

  Matrix& operator[](ParamId id) { return params_[id].value; }
  const Matrix& operator[](ParamId id) const { return params_[id].value; }
  Parameter& at(ParamId id) { return params_.at(id); }
  const Parameter& at(ParamId id) const { return params_.at(id); }

  std::optional<ParamId> find(std::string_view name) const;
  std::size_t size() const { return params_.size(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  // Number of scalars in parameters whose name starts with `prefix`.
  std::size_t scalar_count(std::string_view prefix = {}, bool trainable_only = false) const;

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, ParamId> index_;
};

// Gradient accumulators mirroring a ParameterSet (same ids, same shapes).
class GradientSet {
 public:
  GradientSet() = default;
  explicit GradientSet(const ParameterSet& params);

  Matrix& operator[](ParamId id) { return grads_[id]; }
  const Matrix& operator[](ParamId id) const { return grads_[id]; }
  std::size_t size() const { return grads_.size(); }

  void zero();
  void add(const GradientSet& other);
  void scale(double factor);
  bool all_finite() const;

 private:
  std::vector<Matrix> grads_;
};

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng);

}  // namespace maskct
