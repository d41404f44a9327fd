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

#include <gtest/gtest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "maskct/encoder/attention.hpp"
#include "maskct/encoder/classifier.hpp"
#include "maskct/encoder/encoder_layer.hpp"
#include "maskct/encoder/feature_discovery.hpp"
#include "maskct/encoder/sequence.hpp"

using namespace maskct;
using namespace maskct::encoder;
using maskct::testing::check_gradients;
using maskct::testing::numeric_input_gradient;
using maskct::testing::relative_error;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  return normal_matrix(r, c, scale, rng);
}

double weighted(const Matrix& y, const Matrix& probe) { return (y.array() * probe.array()).sum(); }

EncoderConfig toy_config() { return EncoderConfig{8, 2, 2, 16, 0.0}; }

// Every trainable parameter gets a nonzero random value so no group is trivially zero.
void randomize(ParameterSet& ps, std::uint64_t seed) {
  Rng rng(seed);
  for (ParamId id = 0; id < ps.size(); ++id)
    if (ps.at(id).trainable) ps[id] = normal_matrix(ps[id].rows(), ps[id].cols(), 0.4, rng);
}

}  // namespace

TEST(Attention, IdenticalKeysGiveUniformWeights) {
  Matrix q = random_matrix(3, 4, 1);
  Matrix k = Matrix::Ones(5, 4);
  Matrix w = attention_weights(q, k);
  EXPECT_LT((w.array() - 0.2).abs().maxCoeff(), 1e-15);
}

TEST(Attention, SingleTokenWeightIsOne) {
  Matrix w = attention_weights(random_matrix(1, 4, 2), random_matrix(1, 4, 3));
  EXPECT_EQ(w(0, 0), 1.0);
}

TEST(Attention, TwoByTwoClosedForm) {
  Matrix q(2, 2), k(2, 2);
  q << 1, 0, 0, 1;
  k << 1, 0, 0, 1;
  Matrix w = attention_weights(q, k);
  const double s = 1.0 / std::sqrt(2.0);
  const double hi = std::exp(s) / (std::exp(s) + 1.0);
  EXPECT_NEAR(w(0, 0), hi, 1e-15);
  EXPECT_NEAR(w(0, 1), 1.0 - hi, 1e-15);
  EXPECT_NEAR(w(1, 1), hi, 1e-15);
}

TEST(Attention, RowsSumToOneEvenForLargeScores) {
  Matrix w = attention_weights(random_matrix(6, 8, 4, 100.0), random_matrix(6, 8, 5, 100.0));
  EXPECT_TRUE(w.allFinite());
  for (int r = 0; r < 6; ++r) EXPECT_NEAR(w.row(r).sum(), 1.0, 1e-12);
}

TEST(MultiHeadAttention, HeadWeightsAreStochastic) {
  ParameterSet ps;
  Rng rng(6);
  MultiHeadAttention mha = MultiHeadAttention::create(ps, "mha", 8, 2, rng);
  Matrix x = random_matrix(5, 8, 7);
  for (int h = 0; h < 2; ++h) {
    Matrix w = mha.head_weights(ps, x, h);
    ASSERT_EQ(w.rows(), 5);
    for (int r = 0; r < 5; ++r) EXPECT_NEAR(w.row(r).sum(), 1.0, 1e-12);
    EXPECT_GE(w.minCoeff(), 0.0);
  }
}

TEST(MultiHeadAttention, SingleTokenPassesValueThroughOutput) {
  ParameterSet ps;
  Rng rng(8);
  MultiHeadAttention mha = MultiHeadAttention::create(ps, "mha", 8, 4, rng);
  Matrix x = random_matrix(1, 8, 9);
  Matrix expect = (x * ps[mha.value.weight]) * ps[mha.output.weight];
  if (mha.output.has_bias) expect += ps[mha.output.bias];
  EXPECT_LT((mha.forward(ps, x, nullptr) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MultiHeadAttention, PermutationEquivariant) {
  ParameterSet ps;
  Rng rng(10);
  MultiHeadAttention mha = MultiHeadAttention::create(ps, "mha", 8, 2, rng);
  Matrix x = random_matrix(4, 8, 11);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(4);
  p.indices() << 2, 0, 3, 1;
  Matrix px = p * x;
  Matrix y = mha.forward(ps, x, nullptr);
  EXPECT_LT((mha.forward(ps, px, nullptr) - p * y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MultiHeadAttention, GradientsMatchFiniteDifferences) {
  ParameterSet ps;
  Rng rng(12);
  MultiHeadAttention mha = MultiHeadAttention::create(ps, "mha", 8, 2, rng);
  randomize(ps, 13);
  Matrix x = random_matrix(3, 8, 14), probe = random_matrix(3, 8, 15);
  MultiHeadAttention::Cache cache;
  mha.forward(ps, x, &cache);
  GradientSet g(ps);
  Matrix dx = mha.backward(ps, cache, probe, g);
  for (auto& e : check_gradients(ps, g, [&](const ParameterSet& p) { return weighted(mha.forward(p, x, nullptr), probe); }))
    EXPECT_LE(e.relative, 1e-4) << e.name;
  Matrix ndx = numeric_input_gradient(x, [&](const Matrix& xi) { return weighted(mha.forward(ps, xi, nullptr), probe); });
  EXPECT_LE(relative_error(dx, ndx), 1e-4);
}

TEST(EncoderLayer, ZeroedBranchesGiveIdentity) {
  ParameterSet ps;
  Rng rng(16);
  EncoderLayer layer = EncoderLayer::create(ps, "enc", toy_config(), rng);
  ps[layer.attention.output.weight].setZero();
  if (layer.attention.output.has_bias) ps[layer.attention.output.bias].setZero();
  ps[layer.ffn.contract.weight].setZero();
  ps[layer.ffn.contract.bias].setZero();
  Matrix x = random_matrix(4, 8, 17);
  EXPECT_EQ(layer.forward(ps, x, nullptr, nullptr), x);
}

TEST(EncoderLayer, GradientsMatchFiniteDifferences) {
  ParameterSet ps;
  Rng rng(18);
  EncoderLayer layer = EncoderLayer::create(ps, "enc", toy_config(), rng);
  randomize(ps, 19);
  Matrix x = random_matrix(3, 8, 20), probe = random_matrix(3, 8, 21);
  EncoderLayer::Cache cache;
  layer.forward(ps, x, &cache, nullptr);
  GradientSet g(ps);
  Matrix dx = layer.backward(ps, cache, probe, g);
  for (auto& e : check_gradients(ps, g, [&](const ParameterSet& p) { return weighted(layer.forward(p, x, nullptr, nullptr), probe); }))
    EXPECT_LE(e.relative, 1e-4) << e.name;
  Matrix ndx = numeric_input_gradient(x, [&](const Matrix& xi) { return weighted(layer.forward(ps, xi, nullptr, nullptr), probe); });
  EXPECT_LE(relative_error(dx, ndx), 1e-4);
}

TEST(EncoderLayer, DropoutBackwardUsesSameMask) {
  ParameterSet ps;
  Rng rng(22);
  EncoderConfig cfg = toy_config();
  cfg.ffn_dropout = 0.3;
  EncoderLayer layer = EncoderLayer::create(ps, "enc", cfg, rng);
  randomize(ps, 23);
  Matrix x = random_matrix(3, 8, 24), probe = random_matrix(3, 8, 25);
  EncoderLayer::Cache cache;
  Rng drop(99);
  layer.forward(ps, x, &cache, &drop);
  GradientSet g(ps);
  layer.backward(ps, cache, probe, g);
  auto loss = [&](const ParameterSet& p) {
    Rng same(99);
    return weighted(layer.forward(p, x, nullptr, &same), probe);
  };
  for (auto& e : check_gradients(ps, g, loss)) EXPECT_LE(e.relative, 1e-4) << e.name;
}

TEST(EncoderArray, LayersDoNotShareWeightsAndGradientsMatch) {
  ParameterSet ps;
  Rng rng(26);
  EncoderArray array(ps, "encoder", toy_config(), rng);
  ASSERT_EQ(array.layers().size(), 2u);
  EXPECT_NE(array.layers()[0].attention.query.weight, array.layers()[1].attention.query.weight);
  EXPECT_NE(ps[array.layers()[0].attention.query.weight], ps[array.layers()[1].attention.query.weight]);
  randomize(ps, 27);
  Matrix x = random_matrix(3, 8, 28), probe = random_matrix(3, 8, 29);
  EncoderArray::Cache cache;
  array.forward(ps, x, &cache, nullptr);
  GradientSet g(ps);
  array.backward(ps, cache, probe, g);
  for (auto& e : check_gradients(ps, g, [&](const ParameterSet& p) { return weighted(array.forward(p, x, nullptr, nullptr), probe); }))
    EXPECT_LE(e.relative, 1e-4) << e.name;
}

TEST(EncoderConfig, RejectsIndivisibleWidth) {
  EXPECT_THROW((EncoderConfig{10, 4, 1, 8, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((EncoderConfig{8, 2, 1, 8, 1.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW(EncoderConfig{}.validate());
}

TEST(FeatureDiscovery, MatchesPaddedConvolutionOracle) {
  ParameterSet ps;
  Rng rng(30);
  FeatureDiscovery fd = FeatureDiscovery::create(ps, "fd", 3, rng);
  ps[fd.bias](0, 0) = 0.25;
  Matrix f = random_matrix(6, 5, 31), l = random_matrix(4, 5, 32);
  RowVector out = fd.forward(ps, f, l, nullptr);
  std::vector<double> fp(7, 0.0), lp(7, 0.0);
  for (int j = 0; j < 5; ++j) {
    for (int r = 0; r < 6; ++r) fp[j + 1] += f(r, j) / 6.0;
    for (int r = 0; r < 4; ++r) lp[j + 1] += l(r, j) / 4.0;
  }
  const Matrix& w = ps[fd.kernel];
  for (int j = 0; j < 5; ++j) {
    double expect = 0.25;
    for (int t = 0; t < 3; ++t) expect += w(0, t) * fp[j + t] + w(1, t) * lp[j + t];
    EXPECT_NEAR(out(j), expect, 1e-12);
  }
}

TEST(FeatureDiscovery, InvariantToTokenOrder) {
  ParameterSet ps;
  Rng rng(33);
  FeatureDiscovery fd = FeatureDiscovery::create(ps, "fd", 5, rng);
  Matrix f = random_matrix(6, 8, 34), l = random_matrix(5, 8, 35);
  Eigen::PermutationMatrix<Eigen::Dynamic> pf(6), pl(5);
  pf.indices() << 5, 3, 1, 0, 2, 4;
  pl.indices() << 4, 2, 0, 1, 3;
  RowVector a = fd.forward(ps, f, l, nullptr);
  RowVector b = fd.forward(ps, pf * f, pl * l, nullptr);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FeatureDiscovery, GradientsMatchFiniteDifferences) {
  ParameterSet ps;
  Rng rng(36);
  FeatureDiscovery fd = FeatureDiscovery::create(ps, "fd", 3, rng);
  randomize(ps, 37);
  Matrix f = random_matrix(3, 8, 38), l = random_matrix(2, 8, 39);
  RowVector probe = random_matrix(1, 8, 40);
  FeatureDiscovery::Cache cache;
  fd.forward(ps, f, l, &cache);
  GradientSet g(ps);
  auto grads = fd.backward(ps, cache, probe, g);
  for (auto& e : check_gradients(ps, g, [&](const ParameterSet& p) { return weighted(fd.forward(p, f, l, nullptr), probe); }))
    EXPECT_LE(e.relative, 1e-4) << e.name;
  Matrix nf = numeric_input_gradient(f, [&](const Matrix& fi) { return weighted(fd.forward(ps, fi, l, nullptr), probe); });
  Matrix nl = numeric_input_gradient(l, [&](const Matrix& li) { return weighted(fd.forward(ps, f, li, nullptr), probe); });
  EXPECT_LE(relative_error(grads.features, nf), 1e-6);
  EXPECT_LE(relative_error(grads.labels, nl), 1e-6);
}

TEST(FeatureDiscovery, RejectsEvenKernelAndWidthMismatch) {
  ParameterSet ps;
  Rng rng(41);
  EXPECT_THROW(FeatureDiscovery::create(ps, "fd", 4, rng), std::invalid_argument);
  FeatureDiscovery fd = FeatureDiscovery::create(ps, "fd", 3, rng);
  EXPECT_THROW(fd.forward(ps, random_matrix(2, 4, 1), random_matrix(2, 5, 2), nullptr), std::invalid_argument);
}

TEST(Classifier, SigmoidValues) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(2.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  EXPECT_TRUE(std::isfinite(sigmoid(-800.0)));
  EXPECT_EQ(sigmoid(-800.0), 0.0);
  EXPECT_EQ(sigmoid(800.0), 1.0);
  Eigen::VectorXd v(2);
  v << -1.0, 1.0;
  Eigen::VectorXd p = sigmoid(v);
  EXPECT_NEAR(p(0) + p(1), 1.0, 1e-15);
}

TEST(Classifier, SharedHeadMapsEqualTokensToEqualLogits) {
  ParameterSet ps;
  Rng rng(42);
  ClassifierHead head = ClassifierHead::create(ps, "head", 8, 0.35, rng);
  Matrix tokens = random_matrix(1, 8, 43).replicate(3, 1);
  Eigen::VectorXd logits = head.forward(ps, tokens, nullptr, nullptr);
  ASSERT_EQ(logits.size(), 3);
  EXPECT_EQ(logits(0), logits(1));
  EXPECT_EQ(logits(1), logits(2));
  EXPECT_EQ(ps[head.linear.weight].cols(), 1);
}

TEST(Classifier, GradientsMatchFiniteDifferencesWithDropout) {
  ParameterSet ps;
  Rng rng(44);
  ClassifierHead head = ClassifierHead::create(ps, "head", 8, 0.35, rng);
  randomize(ps, 45);
  Matrix tokens = random_matrix(5, 8, 46);
  Eigen::VectorXd probe = random_matrix(5, 1, 47);
  auto loss = [&](const ParameterSet& p, const Matrix& t) {
    Rng drop(7);
    return head.forward(p, t, nullptr, &drop).dot(probe);
  };
  ClassifierHead::Cache cache;
  Rng drop(7);
  head.forward(ps, tokens, &cache, &drop);
  GradientSet g(ps);
  Matrix dx = head.backward(ps, cache, probe, g);
  for (auto& e : check_gradients(ps, g, [&](const ParameterSet& p) { return loss(p, tokens); }))
    EXPECT_LE(e.relative, 1e-4) << e.name;
  Matrix ndx = numeric_input_gradient(tokens, [&](const Matrix& t) { return loss(ps, t); });
  EXPECT_LE(relative_error(dx, ndx), 1e-6);
}

TEST(Sequence, LayoutIsBijective) {
  Matrix f = random_matrix(4, 6, 48), l = random_matrix(3, 6, 49);
  RowVector d = random_matrix(1, 6, 50);
  EncoderSequence s = assemble_sequence(f, d, l);
  EXPECT_EQ(s.layout.rows(), 8);
  EXPECT_EQ(s.tokens.row(s.layout.discovery_row()), d);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(s.tokens.row(s.layout.feature_row(i)), f.row(i));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(s.tokens.row(s.layout.label_row(i)), l.row(i));
  EXPECT_THROW(assemble_sequence(f, d, random_matrix(3, 5, 1)), std::invalid_argument);
}
