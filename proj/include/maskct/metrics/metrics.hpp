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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace maskct::metrics {

using Rational = boost::multiprecision::cpp_rational;

// p~_i = 1 iff prob_i >= threshold. Threshold must lie in (0, 1).
std::vector<std::uint8_t> binarize(std::span<const double> probs, double threshold = 0.5);

struct ClassCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ClassCounts&) const = default;
};

// Per-class confusion cells over a set of samples.
class ConfusionCounts {
 public:
  ConfusionCounts() = default;
  explicit ConfusionCounts(std::size_t classes) : classes_(classes) {}

  // Adds one sample: truth=1,pred=1 -> TP; 1,0 -> FN; 0,1 -> FP; 0,0 -> TN.
  void add(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> pred);
  // Associative, commutative.
  void merge(const ConfusionCounts& other);

  std::size_t classes() const { return classes_.size(); }
  std::uint64_t samples() const { return samples_; }
  const ClassCounts& at(std::size_t k) const { return classes_.at(k); }
  const std::vector<ClassCounts>& per_class() const { return classes_; }
  bool operator==(const ConfusionCounts&) const = default;

 private:
  std::vector<ClassCounts> classes_;
  std::uint64_t samples_ = 0;
};

ConfusionCounts accumulate(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> pred);

struct PrecisionRecall {
  Rational precision;
  Rational recall;
  bool precision_defined = true;  // false when TP + FP = 0 (value forced to 0)
  bool recall_defined = true;     // false when TP + FN = 0 (value forced to 0)
};

std::vector<PrecisionRecall> class_precision_recall(const ConfusionCounts& counts);

enum class ClassAverage {
  Macro,            // mean of per-class values
  LiteralDoubleSum  // sum over samples and classes of the per-class value, divided by N*K
};

struct ExactMetrics {
  std::vector<PrecisionRecall> per_class;
  Rational cp;
  Rational cr;
  Rational cf1;
  Rational op;
  std::optional<Rational> overall_recall;  // empty when no positives exist
  std::optional<Rational> of1;
  Rational micro_precision;
  Rational micro_recall;
  Rational micro_f1;
};

// Harmonic mean, 0 when both inputs are 0.
Rational harmonic_mean(const Rational& a, const Rational& b);

ExactMetrics aggregate_exact(const ConfusionCounts& counts, ClassAverage average = ClassAverage::Macro);

}  // namespace maskct::metrics
