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

#include "maskct/metrics/metrics.hpp"

#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

namespace maskct::metrics {

std::vector<std::uint8_t> binarize(std::span<const double> probs, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  std::vector<std::uint8_t> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] >= threshold ? 1 : 0;
  return out;
}

void ConfusionCounts::add(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> pred) {
  if (truth.size() != pred.size())
    throw std::invalid_argument("truth has " + std::to_string(truth.size()) + " labels but prediction has " +
                                std::to_string(pred.size()));
  if (classes_.empty() && samples_ == 0) classes_.resize(truth.size());
  if (truth.size() != classes_.size()) throw std::invalid_argument("sample label count differs from the counts");
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k] > 1 || pred[k] > 1) throw std::invalid_argument("labels must be 0 or 1");
    ClassCounts& c = classes_[k];
    if (truth[k] && pred[k])
      ++c.tp;
    else if (truth[k])
      ++c.fn;
    else if (pred[k])
      ++c.fp;
    else
      ++c.tn;
  }
  ++samples_;
}

void ConfusionCounts::merge(const ConfusionCounts& other) {
  if (other.samples_ == 0 && other.classes_.empty()) return;
  if (samples_ == 0 && classes_.empty()) {
    *this = other;
    return;
  }
  if (other.classes_.size() != classes_.size()) throw std::invalid_argument("cannot merge counts over different classes");
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    classes_[k].tp += other.classes_[k].tp;
    classes_[k].fp += other.classes_[k].fp;
    classes_[k].fn += other.classes_[k].fn;
    classes_[k].tn += other.classes_[k].tn;
  }
  samples_ += other.samples_;
}

ConfusionCounts accumulate(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> pred) {
  ConfusionCounts counts(truth.size());
  counts.add(truth, pred);
  return counts;
}

namespace {

Rational ratio(std::uint64_t num, std::uint64_t den) {
  return Rational(boost::multiprecision::cpp_int(num), boost::multiprecision::cpp_int(den));
}

}  // namespace

std::vector<PrecisionRecall> class_precision_recall(const ConfusionCounts& counts) {
  std::vector<PrecisionRecall> out(counts.classes());
  for (std::size_t k = 0; k < counts.classes(); ++k) {
    const ClassCounts& c = counts.at(k);
    PrecisionRecall& pr = out[k];
    if (c.tp + c.fp == 0) {
      pr.precision_defined = false;
      spdlog::debug("class {}: precision undefined (no predicted positives), using 0", k);
    } else {
      pr.precision = ratio(c.tp, c.tp + c.fp);
    }
    if (c.tp + c.fn == 0) {
      pr.recall_defined = false;
      spdlog::debug("class {}: recall undefined (no actual positives), using 0", k);
    } else {
      pr.recall = ratio(c.tp, c.tp + c.fn);
    }
  }
  return out;
}

Rational harmonic_mean(const Rational& a, const Rational& b) {
  if (a + b == 0) return Rational(0);
  return 2 * a * b / (a + b);
}

ExactMetrics aggregate_exact(const ConfusionCounts& counts, ClassAverage average) {
  if (counts.samples() == 0) throw std::invalid_argument("metrics need at least one sample");
  const std::size_t K = counts.classes();
  if (K == 0) throw std::invalid_argument("metrics need at least one class");
  const std::uint64_t N = counts.samples();

  ExactMetrics m;
  m.per_class = class_precision_recall(counts);
  Rational psum = 0;
  Rational rsum = 0;
  if (average == ClassAverage::Macro) {
    for (const auto& pr : m.per_class) {
      psum += pr.precision;
      rsum += pr.recall;
    }
    m.cp = psum / K;
    m.cr = rsum / K;
  } else {
    for (std::uint64_t n = 0; n < N; ++n) {
      for (const auto& pr : m.per_class) {
        psum += pr.precision;
        rsum += pr.recall;
      }
    }
    m.cp = psum / (N * K);
    m.cr = rsum / (N * K);
  }
  m.cf1 = harmonic_mean(m.cp, m.cr);

  std::uint64_t matches = 0;
  std::uint64_t positives = 0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (const auto& c : counts.per_class()) {
    matches += c.tp + c.tn;
    positives += c.tp + c.fn;
    tp += c.tp;
    fp += c.fp;
  }
  m.op = ratio(matches, N * K);
  if (positives > 0) {
    m.overall_recall = ratio(matches, positives);
    m.of1 = harmonic_mean(m.op, *m.overall_recall);
  } else {
    spdlog::debug("overall recall undefined: no positive labels in {} samples", N);
  }
  m.micro_precision = tp + fp == 0 ? Rational(0) : ratio(tp, tp + fp);
  m.micro_recall = positives == 0 ? Rational(0) : ratio(tp, positives);
  m.micro_f1 = harmonic_mean(m.micro_precision, m.micro_recall);
  return m;
}

}  // namespace maskct::metrics
