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

#include <numeric>

#include "maskct/core/rng.hpp"
#include "maskct/metrics/metrics.hpp"
#include "maskct/metrics/report.hpp"

using namespace maskct;
using namespace maskct::metrics;

namespace {

// Reduced fraction on plain integers, independent of the library's rational type.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;
  static Frac make(std::int64_t n, std::int64_t d) {
    if (d == 0) return {0, 1};
    const std::int64_t g = std::gcd(n, d);
    return {n / g, d / g};
  }
  Frac operator+(const Frac& o) const { return make(num * o.den + o.num * den, den * o.den); }
  Frac operator*(const Frac& o) const { return make(num * o.num, den * o.den); }
  Frac operator/(const Frac& o) const { return make(num * o.den, den * o.num); }
};

bool same(const Rational& r, const Frac& f) {
  return numerator(r) == f.num && denominator(r) == f.den;
}

Frac hmean(const Frac& a, const Frac& b) {
  if (a.num == 0 && b.num == 0) return {0, 1};
  return Frac{2, 1} * a * b / (a + b);
}

struct Oracle {
  Frac cp, cr, cf1, op, micro_p, micro_r;
  bool or_defined = false;
  Frac overall_recall, of1;
};

Oracle brute_force(const std::vector<std::vector<int>>& truth, const std::vector<std::vector<int>>& pred) {
  const std::int64_t N = static_cast<std::int64_t>(truth.size()), K = static_cast<std::int64_t>(truth[0].size());
  Oracle o;
  Frac psum{0, 1}, rsum{0, 1};
  std::int64_t all_tp = 0, all_fp = 0;
  for (std::int64_t i = 0; i < K; ++i) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::int64_t n = 0; n < N; ++n) {
      tp += truth[n][i] == 1 && pred[n][i] == 1;
      fp += truth[n][i] == 0 && pred[n][i] == 1;
      fn += truth[n][i] == 1 && pred[n][i] == 0;
    }
    psum = psum + Frac::make(tp, tp + fp);
    rsum = rsum + Frac::make(tp, tp + fn);
    all_tp += tp;
    all_fp += fp;
  }
  o.cp = psum / Frac{K, 1};
  o.cr = rsum / Frac{K, 1};
  o.cf1 = hmean(o.cp, o.cr);
  std::int64_t f = 0, positives = 0;
  for (std::int64_t n = 0; n < N; ++n)
    for (std::int64_t i = 0; i < K; ++i) {
      f += truth[n][i] == pred[n][i];
      positives += truth[n][i];
    }
  o.op = Frac::make(f, N * K);
  if (positives > 0) {
    o.or_defined = true;
    o.overall_recall = Frac::make(f, positives);
    o.of1 = hmean(o.op, o.overall_recall);
  }
  o.micro_p = Frac::make(all_tp, all_tp + all_fp);
  o.micro_r = Frac::make(all_tp, positives);
  return o;
}

std::vector<std::vector<int>> unpack(unsigned bits, int n, int k) {
  std::vector<std::vector<int>> out(n, std::vector<int>(k));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < k; ++b) out[a][b] = (bits >> (a * k + b)) & 1;
  return out;
}

ConfusionCounts to_counts(const std::vector<std::vector<int>>& truth, const std::vector<std::vector<int>>& pred) {
  ConfusionCounts c(truth[0].size());
  for (std::size_t n = 0; n < truth.size(); ++n) {
    std::vector<std::uint8_t> t(truth[n].begin(), truth[n].end()), p(pred[n].begin(), pred[n].end());
    c.add(t, p);
  }
  return c;
}

}  // namespace

TEST(Binarize, ThresholdIsInclusive) {
  std::vector<double> p{0.5, 0.5, 0.5};
  EXPECT_EQ(binarize(p, 0.5), (std::vector<std::uint8_t>{1, 1, 1}));
  std::vector<double> q{0.2, 0.999999, 0.7, 0.0};
  EXPECT_EQ(binarize(q, 1.0 - 1e-12), (std::vector<std::uint8_t>{0, 0, 0, 0}));
  EXPECT_THROW(binarize(q, 0.0), std::invalid_argument);
  EXPECT_THROW(binarize(q, 1.0), std::invalid_argument);
}

TEST(Binarize, MatchesElementwiseComparison) {
  Rng rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(7);
    for (double& v : p) v = d(rng);
    const double t = 0.05 + 0.9 * d(rng);
    auto b = binarize(p, t);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(b[i], p[i] >= t ? 1 : 0);
  }
}

TEST(Accumulate, TableCells) {
  std::vector<std::uint8_t> t{1, 0}, p{1, 0};
  ConfusionCounts c = accumulate(t, p);
  EXPECT_EQ(c.at(0), (ClassCounts{1, 0, 0, 0}));
  EXPECT_EQ(c.at(1), (ClassCounts{0, 0, 0, 1}));
  std::vector<std::uint8_t> ones{1, 1}, zeros{0, 0};
  ConfusionCounts d = accumulate(ones, zeros);
  EXPECT_EQ(d.at(0).fn, 1u);
  EXPECT_EQ(d.at(1).fn, 1u);
  std::vector<std::uint8_t> shorter{1};
  EXPECT_THROW(accumulate(ones, shorter), std::invalid_argument);
  std::vector<std::uint8_t> bad{2, 0};
  EXPECT_THROW(accumulate(bad, zeros), std::invalid_argument);
}

TEST(Accumulate, MatchesBruteForceFourWayCount) {
  Rng rng(2);
  ConfusionCounts c(4);
  std::vector<std::array<std::uint64_t, 4>> expect(4, {0, 0, 0, 0});
  for (int s = 0; s < 100; ++s) {
    std::vector<std::uint8_t> t(4), p(4);
    for (int k = 0; k < 4; ++k) {
      t[k] = rng() & 1;
      p[k] = rng() & 1;
      const int cell = t[k] ? (p[k] ? 0 : 2) : (p[k] ? 1 : 3);
      ++expect[k][cell];
    }
    c.add(t, p);
  }
  EXPECT_EQ(c.samples(), 100u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(c.at(k), (ClassCounts{expect[k][0], expect[k][1], expect[k][2], expect[k][3]}));
    EXPECT_EQ(c.at(k).total(), 100u);
  }
}

TEST(PrecisionRecall, FormulaAndZeroPolicy) {
  ConfusionCounts c(2);
  std::vector<std::uint8_t> t1{1, 0}, p1{1, 0}, t2{1, 0}, p2{1, 0}, t3{0, 0}, p3{1, 0}, t4{1, 0}, p4{0, 0};
  c.add(t1, p1);
  c.add(t2, p2);
  c.add(t3, p3);
  c.add(t4, p4);
  auto pr = class_precision_recall(c);
  EXPECT_EQ(pr[0].precision, Rational(2, 3));
  EXPECT_EQ(pr[0].recall, Rational(2, 3));
  EXPECT_EQ(pr[1].precision, 0);
  EXPECT_FALSE(pr[1].precision_defined);
  EXPECT_FALSE(pr[1].recall_defined);
}

TEST(PrecisionRecall, RandomCountsMatchDivision) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    ConfusionCounts c(3);
    for (int s = 0; s < 20; ++s) {
      std::vector<std::uint8_t> t(3), p(3);
      for (int k = 0; k < 3; ++k) {
        t[k] = rng() & 1;
        p[k] = rng() & 1;
      }
      c.add(t, p);
    }
    auto pr = class_precision_recall(c);
    for (int k = 0; k < 3; ++k) {
      const auto& cc = c.at(k);
      if (cc.tp + cc.fp > 0) EXPECT_EQ(pr[k].precision, Rational(cc.tp, cc.tp + cc.fp));
      if (cc.tp + cc.fn > 0) EXPECT_EQ(pr[k].recall, Rational(cc.tp, cc.tp + cc.fn));
    }
  }
}

TEST(Aggregate, WorkedExample) {
  std::vector<std::vector<int>> truth{{1, 0}, {1, 1}}, pred{{1, 0}, {0, 1}};
  ExactMetrics m = aggregate_exact(to_counts(truth, pred));
  EXPECT_EQ(m.op, Rational(3, 4));
  ASSERT_TRUE(m.overall_recall.has_value());
  EXPECT_EQ(*m.overall_recall, Rational(1));
  EXPECT_EQ(harmonic_mean(Rational(4, 5), Rational(4, 5)), Rational(4, 5));
  EXPECT_EQ(harmonic_mean(Rational(0), Rational(0)), Rational(0));
}

TEST(Aggregate, ExhaustiveOracleEquivalence) {
  for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const unsigned cells = static_cast<unsigned>(n * k);
    for (unsigned t = 0; t < (1u << cells); ++t)
      for (unsigned p = 0; p < (1u << cells); ++p) {
        auto truth = unpack(t, n, k), pred = unpack(p, n, k);
        ExactMetrics m = aggregate_exact(to_counts(truth, pred));
        Oracle o = brute_force(truth, pred);
        ASSERT_TRUE(same(m.cp, o.cp) && same(m.cr, o.cr) && same(m.cf1, o.cf1) && same(m.op, o.op))
            << "t=" << t << " p=" << p;
        ASSERT_EQ(m.overall_recall.has_value(), o.or_defined);
        if (o.or_defined) ASSERT_TRUE(same(*m.overall_recall, o.overall_recall) && same(*m.of1, o.of1));
        ASSERT_TRUE(same(m.micro_precision, o.micro_p) && same(m.micro_recall, o.micro_r));
      }
  }
}

TEST(Aggregate, LiteralDoubleSumEqualsMacro) {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    ConfusionCounts c(3);
    for (int s = 0; s < 7; ++s) {
      std::vector<std::uint8_t> t(3), p(3);
      for (int kk = 0; kk < 3; ++kk) {
        t[kk] = rng() & 1;
        p[kk] = rng() & 1;
      }
      c.add(t, p);
    }
    ExactMetrics a = aggregate_exact(c, ClassAverage::Macro);
    ExactMetrics b = aggregate_exact(c, ClassAverage::LiteralDoubleSum);
    EXPECT_EQ(a.cp, b.cp);
    EXPECT_EQ(a.cr, b.cr);
  }
}

TEST(Aggregate, PerfectAllPositivePredictionsAreOne) {
  std::vector<std::vector<int>> all{{1, 1, 1}, {1, 1, 1}};
  ExactMetrics m = aggregate_exact(to_counts(all, all));
  for (const Rational& v : {m.cp, m.cr, m.cf1, m.op, *m.overall_recall, *m.of1, m.micro_precision, m.micro_recall, m.micro_f1})
    EXPECT_EQ(v, 1);
}

TEST(Aggregate, PerfectPredictionsWithEveryClassPresent) {
  std::vector<std::vector<int>> truth{{1, 0, 1}, {0, 1, 1}, {0, 0, 0}};
  ExactMetrics m = aggregate_exact(to_counts(truth, truth));
  EXPECT_EQ(m.cp, 1);
  EXPECT_EQ(m.cr, 1);
  EXPECT_EQ(m.cf1, 1);
  EXPECT_EQ(m.op, 1);
  EXPECT_EQ(m.micro_f1, 1);
  // As printed, OR divides all matches (including true negatives) by the positive count.
  EXPECT_EQ(*m.overall_recall, Rational(9, 4));
}

TEST(Aggregate, NoPositivesLeavesOverallRecallUndefined) {
  std::vector<std::vector<int>> zeros{{0, 0}, {0, 0}};
  ExactMetrics m = aggregate_exact(to_counts(zeros, zeros));
  EXPECT_FALSE(m.overall_recall.has_value());
  EXPECT_FALSE(m.of1.has_value());
  EXPECT_EQ(m.op, 1);
  EXPECT_THROW(aggregate_exact(ConfusionCounts(2)), std::invalid_argument);
}

TEST(Aggregate, BoundedValuesAndHarmonicMeanBetweenInputs) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionCounts c(4);
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int s = 0; s < n; ++s) {
      std::vector<std::uint8_t> t(4), p(4);
      for (int k = 0; k < 4; ++k) {
        t[k] = rng() & 1;
        p[k] = rng() & 1;
      }
      c.add(t, p);
    }
    ExactMetrics m = aggregate_exact(c);
    for (const Rational& v : {m.cp, m.cr, m.cf1, m.op, m.micro_precision, m.micro_recall, m.micro_f1}) {
      EXPECT_GE(v, 0);
      EXPECT_LE(v, 1);
    }
    EXPECT_LE(m.cf1, std::max(m.cp, m.cr));
    EXPECT_GE(m.cf1, std::min(m.cp, m.cr));
  }
}

TEST(Aggregate, CorrectSampleNeverLowersOverallPrecision) {
  Rng rng(6);
  ConfusionCounts c(3);
  for (int s = 0; s < 60; ++s) {
    std::vector<std::uint8_t> t(3), p(3);
    for (int k = 0; k < 3; ++k) {
      t[k] = rng() & 1;
      p[k] = rng() & 1;
    }
    c.add(t, p);
    Rational before = aggregate_exact(c).op;
    ConfusionCounts extended = c;
    extended.add(t, t);
    EXPECT_GE(aggregate_exact(extended).op, before);
  }
}

TEST(Merge, AssociativeAndCommutative) {
  Rng rng(7);
  auto random_counts = [&] {
    ConfusionCounts c(3);
    for (int s = 0; s < 5; ++s) {
      std::vector<std::uint8_t> t(3), p(3);
      for (int k = 0; k < 3; ++k) {
        t[k] = rng() & 1;
        p[k] = rng() & 1;
      }
      c.add(t, p);
    }
    return c;
  };
  ConfusionCounts a = random_counts(), b = random_counts(), d = random_counts();
  ConfusionCounts ab_d = a;
  ab_d.merge(b);
  ab_d.merge(d);
  ConfusionCounts bd = b;
  bd.merge(d);
  ConfusionCounts a_bd = a;
  a_bd.merge(bd);
  EXPECT_EQ(ab_d, a_bd);
  ConfusionCounts ba = b;
  ba.merge(a);
  ConfusionCounts ab = a;
  ab.merge(b);
  EXPECT_EQ(ab, ba);
  EXPECT_THROW(a.merge(ConfusionCounts(2)), std::invalid_argument);
}

TEST(Report, JsonRoundTripAndStableBytes) {
  std::vector<std::vector<int>> truth{{1, 0}, {1, 1}, {0, 1}}, pred{{1, 0}, {0, 1}, {1, 1}};
  MetricsReport r = aggregate(to_counts(truth, pred), {"rainy", "foggy"}, 0.5);
  r.dataset = "test.jsonl";
  r.config_hash = "deadbeef";
  const std::string a = emit_report(r), b = emit_report(r);
  EXPECT_EQ(a, b);
  MetricsReport back = report_from_json(nlohmann::json::parse(a));
  EXPECT_EQ(back, r);
  auto j = nlohmann::ordered_json::parse(a);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"dataset", "config_hash", "threshold", "class_average", "samples", "classes",
                                            "per_class", "CP", "CR", "CF1", "OP", "OR", "OF1", "micro_precision",
                                            "micro_recall", "micro_f1"}));
  EXPECT_EQ(j["per_class"][0]["name"], "rainy");
}

TEST(Report, UndefinedOverallRecallIsNull) {
  std::vector<std::vector<int>> zeros{{0, 0}};
  MetricsReport r = aggregate(to_counts(zeros, zeros), {"a", "b"}, 0.5);
  auto j = nlohmann::json::parse(emit_report(r));
  EXPECT_TRUE(j["OR"].is_null());
  EXPECT_TRUE(j["OF1"].is_null());
  EXPECT_EQ(report_from_json(j), r);
}

TEST(Report, DoubleValuesMatchExactRationals) {
  std::vector<std::vector<int>> truth{{1, 0, 1}, {1, 1, 0}, {0, 1, 1}}, pred{{1, 1, 1}, {0, 1, 0}, {0, 1, 0}};
  ConfusionCounts c = to_counts(truth, pred);
  MetricsReport r = aggregate(c, {"x", "y", "z"}, 0.5);
  ExactMetrics m = aggregate_exact(c);
  EXPECT_EQ(r.cp, m.cp.convert_to<double>());
  EXPECT_EQ(r.cf1, m.cf1.convert_to<double>());
  EXPECT_EQ(r.samples, 3u);
  EXPECT_EQ(r.classes, 3u);
}
