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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskct/metrics/metrics.hpp"

namespace maskct::metrics {

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  ClassCounts counts;

  bool operator==(const ClassMetrics&) const = default;
};

struct MetricsReport {
  std::string dataset;
  std::string config_hash;
  double threshold = 0.5;
  std::string class_average = "macro";
  std::uint64_t samples = 0;
  std::uint64_t classes = 0;
  std::vector<ClassMetrics> per_class;
  double cp = 0.0;
  double cr = 0.0;
  double cf1 = 0.0;
  double op = 0.0;
  std::optional<double> overall_recall;
  std::optional<double> of1;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport aggregate(const ConfusionCounts& counts, const std::vector<std::string>& class_names, double threshold,
                        ClassAverage average = ClassAverage::Macro);

nlohmann::ordered_json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);
// Pretty-printed JSON with a fixed key order; identical reports give identical bytes.
std::string emit_report(const MetricsReport& report);

}  // namespace maskct::metrics
