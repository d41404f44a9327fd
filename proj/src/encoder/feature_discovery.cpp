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

#include "maskct/encoder/feature_discovery.hpp"

#include <cmath>
#include <stdexcept>

namespace maskct::encoder {

FeatureDiscovery FeatureDiscovery::create(ParameterSet& ps, const std::string& name, int kernel_size, Rng& rng) {
  if (kernel_size < 1 || kernel_size % 2 == 0) throw std::invalid_argument("feature discovery kernel must be odd");
  FeatureDiscovery fd;
  fd.kernel_size = kernel_size;
  fd.kernel = ps.add(name + ".kernel", normal_matrix(2, kernel_size, 1.0 / std::sqrt(2.0 * kernel_size), rng));
  fd.bias = ps.add(name + ".bias", Matrix::Zero(1, 1));
  return fd;
}

RowVector FeatureDiscovery::forward(const ParameterSet& ps, const Matrix& features, const Matrix& label_states,
                                    Cache* cache) const {
  if (features.cols() != label_states.cols()) throw std::invalid_argument("feature discovery: width mismatch");
  if (features.rows() == 0 || label_states.rows() == 0) throw std::invalid_argument("feature discovery: empty input");
  const Matrix& w = ps[kernel];
  const Eigen::Index width = features.cols();
  const int half = kernel_size / 2;
  RowVector fpool = features.colwise().mean();
  RowVector lpool = label_states.colwise().mean();
  RowVector out = RowVector::Constant(width, ps[bias](0, 0));
  for (Eigen::Index j = 0; j < width; ++j) {
    for (int t = 0; t < kernel_size; ++t) {
      const Eigen::Index src = j + t - half;
      if (src < 0 || src >= width) continue;
      out(j) += w(0, t) * fpool(src) + w(1, t) * lpool(src);
    }
  }
  if (cache) {
    cache->feature_pool = std::move(fpool);
    cache->label_pool = std::move(lpool);
    cache->feature_rows = features.rows();
    cache->label_rows = label_states.rows();
  }
  return out;
}

FeatureDiscovery::InputGrads FeatureDiscovery::backward(const ParameterSet& ps, const Cache& c, const RowVector& dfd,
                                                        GradientSet& grads) const {
  const Matrix& w = ps[kernel];
  const Eigen::Index width = dfd.cols();
  const int half = kernel_size / 2;
  RowVector dfpool = RowVector::Zero(width);
  RowVector dlpool = RowVector::Zero(width);
  Matrix& dw = grads[kernel];
  for (Eigen::Index j = 0; j < width; ++j) {
    for (int t = 0; t < kernel_size; ++t) {
      const Eigen::Index src = j + t - half;
      if (src < 0 || src >= width) continue;
      dw(0, t) += dfd(j) * c.feature_pool(src);
      dw(1, t) += dfd(j) * c.label_pool(src);
      dfpool(src) += dfd(j) * w(0, t);
      dlpool(src) += dfd(j) * w(1, t);
    }
  }
  grads[bias](0, 0) += dfd.sum();
  InputGrads g;
  g.features = dfpool.replicate(c.feature_rows, 1) / static_cast<double>(c.feature_rows);
  g.labels = dlpool.replicate(c.label_rows, 1) / static_cast<double>(c.label_rows);
  return g;
}

}  // namespace maskct::encoder
