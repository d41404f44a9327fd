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

#include <Eigen/Dense>

namespace maskct {

// Token-major storage: one row per token / pixel, one column per channel.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

// A spatial activation in HWC order, stored as (height*width) x channels.
struct SpatialTensor {
  int height = 0;
  int width = 0;
  Matrix values;

  int channels() const { return static_cast<int>(values.cols()); }
  Eigen::Index pixels() const { return static_cast<Eigen::Index>(height) * width; }
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace maskct
