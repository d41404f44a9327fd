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

#include "maskct/nn/layers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace maskct::nn {

Linear Linear::create(ParameterSet& ps, const std::string& name, int in, int out, Rng& rng, bool bias,
                      double stddev) {
  Linear l;
  l.in_features = in;
  l.out_features = out;
  l.has_bias = bias;
  if (stddev < 0.0) stddev = std::sqrt(1.0 / in);
  l.weight = ps.add(name + ".weight", normal_matrix(in, out, stddev, rng));
  if (bias) l.bias = ps.add(name + ".bias", Matrix::Zero(1, out));
  return l;
}

Matrix Linear::forward(const ParameterSet& ps, const Matrix& x) const {
  if (x.cols() != in_features)
    throw std::invalid_argument("linear: expected " + std::to_string(in_features) + " input features, got " +
                                std::to_string(x.cols()));
  Matrix y = x * ps[weight];
  if (has_bias) y.rowwise() += ps[bias].row(0);
  return y;
}

Matrix Linear::backward(const ParameterSet& ps, const Matrix& x, const Matrix& dy, GradientSet& grads) const {
  grads[weight].noalias() += x.transpose() * dy;
  if (has_bias) grads[bias] += dy.colwise().sum();
  return dy * ps[weight].transpose();
}

LayerNorm LayerNorm::create(ParameterSet& ps, const std::string& name, int features) {
  LayerNorm ln;
  ln.gamma = ps.add(name + ".weight", Matrix::Ones(1, features));
  ln.beta = ps.add(name + ".bias", Matrix::Zero(1, features));
  return ln;
}

Matrix LayerNorm::forward(const ParameterSet& ps, const Matrix& x, Cache* cache) const {
  const auto d = static_cast<double>(x.cols());
  Eigen::VectorXd mean = x.rowwise().sum() / d;
  Matrix centered = x.colwise() - mean;
  Eigen::VectorXd var = centered.array().square().rowwise().sum() / d;
  Eigen::VectorXd inv_std = (var.array() + eps).rsqrt();
  Matrix normalized = centered.array().colwise() * inv_std.array();
  Matrix y = normalized.array().rowwise() * ps[gamma].row(0).array();
  y.rowwise() += ps[beta].row(0);
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Matrix LayerNorm::backward(const ParameterSet& ps, const Cache& cache, const Matrix& dy, GradientSet& grads) const {
  grads[gamma] += (dy.array() * cache.normalized.array()).colwise().sum().matrix();
  grads[beta] += dy.colwise().sum();
  const auto d = static_cast<double>(dy.cols());
  Matrix dn = dy.array().rowwise() * ps[gamma].row(0).array();
  Eigen::VectorXd mean_dn = dn.rowwise().sum() / d;
  Eigen::VectorXd mean_dn_n = (dn.array() * cache.normalized.array()).rowwise().sum() / d;
  Matrix dx = dn.colwise() - mean_dn;
  dx -= (cache.normalized.array().colwise() * mean_dn_n.array()).matrix();
  return dx.array().colwise() * cache.inv_std.array();
}

Matrix Dropout::sample_mask(Eigen::Index rows, Eigen::Index cols, Rng& rng) const {
  if (rate <= 0.0) return Matrix::Ones(rows, cols);
  if (rate >= 1.0) return Matrix::Zero(rows, cols);
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = keep(rng) ? scale : 0.0;
  return m;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out = logits.colwise() - logits.rowwise().maxCoeff();
  out = out.array().exp();
  Eigen::VectorXd sums = out.rowwise().sum();
  return out.array().colwise() / sums.array();
}

Conv2d Conv2d::create(ParameterSet& ps, const std::string& name, int in, int out, int kernel, int stride,
                      int padding, Rng& rng) {
  Conv2d c;
  c.in_channels = in;
  c.out_channels = out;
  c.kernel = kernel;
  c.stride = stride;
  c.padding = padding;
  // He initialisation, fan-out mode.
  const double stddev = std::sqrt(2.0 / (static_cast<double>(out) * kernel * kernel));
  c.weight = ps.add(name + ".weight", normal_matrix(static_cast<Eigen::Index>(kernel) * kernel * in, out, stddev, rng));
  return c;
}

SpatialTensor Conv2d::forward(const ParameterSet& ps, const SpatialTensor& x, Cache* cache) const {
  if (x.channels() != in_channels)
    throw std::invalid_argument("conv2d: expected " + std::to_string(in_channels) + " channels, got " +
                                std::to_string(x.channels()));
  const int oh = output_extent(x.height), ow = output_extent(x.width);
  if (oh <= 0 || ow <= 0) throw std::invalid_argument("conv2d: input too small");
  const Eigen::Index patch = static_cast<Eigen::Index>(kernel) * kernel * in_channels;

  Matrix columns;
  const bool pointwise = kernel == 1 && stride == 1 && padding == 0;
  if (pointwise) {
    columns = x.values;
  } else {
    columns = Matrix::Zero(static_cast<Eigen::Index>(oh) * ow, patch);
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const Eigen::Index row = static_cast<Eigen::Index>(oy) * ow + ox;
        for (int ky = 0; ky < kernel; ++ky) {
          const int iy = oy * stride - padding + ky;
          if (iy < 0 || iy >= x.height) continue;
          for (int kx = 0; kx < kernel; ++kx) {
            const int ix = ox * stride - padding + kx;
            if (ix < 0 || ix >= x.width) continue;
            columns.row(row).segment(static_cast<Eigen::Index>(ky * kernel + kx) * in_channels, in_channels) =
                x.values.row(static_cast<Eigen::Index>(iy) * x.width + ix);
          }
        }
      }
    }
  }
  SpatialTensor y{oh, ow, Matrix()};
  y.values.noalias() = columns * ps[weight];
  if (cache) {
    cache->in_height = x.height;
    cache->in_width = x.width;
    cache->columns = std::move(columns);
  }
  return y;
}

SpatialTensor Conv2d::backward(const ParameterSet& ps, const Cache& cache, const SpatialTensor& dy,
                               GradientSet& grads, bool input_grad) const {
  grads[weight].noalias() += cache.columns.transpose() * dy.values;
  SpatialTensor dx{cache.in_height, cache.in_width, Matrix()};
  if (!input_grad) return dx;
  Matrix dcols = dy.values * ps[weight].transpose();
  if (kernel == 1 && stride == 1 && padding == 0) {
    dx.values = std::move(dcols);
    return dx;
  }
  dx.values = Matrix::Zero(static_cast<Eigen::Index>(cache.in_height) * cache.in_width, in_channels);
  for (int oy = 0; oy < dy.height; ++oy) {
    for (int ox = 0; ox < dy.width; ++ox) {
      const Eigen::Index row = static_cast<Eigen::Index>(oy) * dy.width + ox;
      for (int ky = 0; ky < kernel; ++ky) {
        const int iy = oy * stride - padding + ky;
        if (iy < 0 || iy >= cache.in_height) continue;
        for (int kx = 0; kx < kernel; ++kx) {
          const int ix = ox * stride - padding + kx;
          if (ix < 0 || ix >= cache.in_width) continue;
          dx.values.row(static_cast<Eigen::Index>(iy) * cache.in_width + ix) +=
              dcols.row(row).segment(static_cast<Eigen::Index>(ky * kernel + kx) * in_channels, in_channels);
        }
      }
    }
  }
  return dx;
}

FrozenBatchNorm FrozenBatchNorm::create(ParameterSet& ps, const std::string& name, int channels, double gamma_init) {
  FrozenBatchNorm bn;
  bn.gamma = ps.add(name + ".weight", Matrix::Constant(1, channels, gamma_init));
  bn.beta = ps.add(name + ".bias", Matrix::Zero(1, channels));
  bn.running_mean = ps.add(name + ".running_mean", Matrix::Zero(1, channels), false);
  bn.running_var = ps.add(name + ".running_var", Matrix::Ones(1, channels), false);
  return bn;
}

SpatialTensor FrozenBatchNorm::forward(const ParameterSet& ps, const SpatialTensor& x, Cache* cache) const {
  RowVector inv_std = (ps[running_var].row(0).array() + eps).rsqrt().matrix();
  Matrix normalized = (x.values.rowwise() - ps[running_mean].row(0)).array().rowwise() * inv_std.array();
  SpatialTensor y{x.height, x.width, Matrix()};
  y.values = normalized.array().rowwise() * ps[gamma].row(0).array();
  y.values.rowwise() += ps[beta].row(0);
  if (cache) cache->normalized = std::move(normalized);
  return y;
}

SpatialTensor FrozenBatchNorm::backward(const ParameterSet& ps, const Cache& cache, const SpatialTensor& dy,
                                        GradientSet& grads) const {
  grads[gamma] += (dy.values.array() * cache.normalized.array()).colwise().sum().matrix();
  grads[beta] += dy.values.colwise().sum();
  RowVector scale = (ps[running_var].row(0).array() + eps).rsqrt() * ps[gamma].row(0).array();
  SpatialTensor dx{dy.height, dy.width, Matrix()};
  dx.values = dy.values.array().rowwise() * scale.array();
  return dx;
}

SpatialTensor MaxPool2d::forward(const SpatialTensor& x, Cache* cache) const {
  const int oh = output_extent(x.height), ow = output_extent(x.width);
  const Eigen::Index channels = x.values.cols();
  SpatialTensor y{oh, ow, Matrix(static_cast<Eigen::Index>(oh) * ow, channels)};
  std::vector<Eigen::Index> argmax(static_cast<std::size_t>(y.values.size()), -1);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const Eigen::Index orow = static_cast<Eigen::Index>(oy) * ow + ox;
      for (Eigen::Index c = 0; c < channels; ++c) {
        double best = -std::numeric_limits<double>::infinity();
        Eigen::Index best_idx = -1;
        for (int ky = 0; ky < kernel; ++ky) {
          const int iy = oy * stride - padding + ky;
          if (iy < 0 || iy >= x.height) continue;
          for (int kx = 0; kx < kernel; ++kx) {
            const int ix = ox * stride - padding + kx;
            if (ix < 0 || ix >= x.width) continue;
            const Eigen::Index irow = static_cast<Eigen::Index>(iy) * x.width + ix;
            const double v = x.values(irow, c);
            if (v > best) {
              best = v;
              best_idx = irow * channels + c;
            }
          }
        }
        y.values(orow, c) = best;
        argmax[static_cast<std::size_t>(orow * channels + c)] = best_idx;
      }
    }
  }
  if (cache) {
    cache->in_height = x.height;
    cache->in_width = x.width;
    cache->argmax = std::move(argmax);
  }
  return y;
}

SpatialTensor MaxPool2d::backward(const Cache& cache, const SpatialTensor& dy) const {
  const Eigen::Index channels = dy.values.cols();
  SpatialTensor dx{cache.in_height, cache.in_width,
                   Matrix::Zero(static_cast<Eigen::Index>(cache.in_height) * cache.in_width, channels)};
  for (Eigen::Index i = 0; i < dy.values.size(); ++i) {
    const Eigen::Index src = cache.argmax[static_cast<std::size_t>(i)];
    if (src >= 0) dx.values.data()[src] += dy.values.data()[i];
  }
  return dx;
}

}  // namespace maskct::nn
