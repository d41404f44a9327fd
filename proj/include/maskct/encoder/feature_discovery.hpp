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

#include "maskct/core/parameters.hpp"

namespace maskct::encoder {

// Fuses the mean feature embedding and the mean label-state embedding into a
// single token: the two pooled vectors are stacked as two input channels and
// convolved along the feature axis (zero padding, odd kernel) into one output
// channel of width d_model.
struct FeatureDiscovery {
  ParamId kernel = 0;  // 2 x kernel_size: row 0 feature channel, row 1 label channel
  ParamId bias = 0;    // 1 x 1
  int kernel_size = 3;

  struct Cache {
    RowVector feature_pool;
    RowVector label_pool;
    Eigen::Index feature_rows = 0;
    Eigen::Index label_rows = 0;
  };

  struct InputGrads {
    Matrix features;
    Matrix labels;
  };

  static FeatureDiscovery create(ParameterSet& ps, const std::string& name, int kernel_size, Rng& rng);

  RowVector forward(const ParameterSet& ps, const Matrix& features, const Matrix& label_states, Cache* cache) const;
  InputGrads backward(const ParameterSet& ps, const Cache& cache, const RowVector& dfd, GradientSet& grads) const;
};

}  // namespace maskct::encoder
