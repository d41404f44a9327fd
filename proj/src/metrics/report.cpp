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

#include "maskct/metrics/report.hpp"

#include <stdexcept>

namespace maskct::metrics {

namespace {

double to_double(const Rational& r) { return r.convert_to<double>(); }

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::optional<double> read_optional(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

MetricsReport aggregate(const ConfusionCounts& counts, const std::vector<std::string>& class_names, double threshold,
                        ClassAverage average) {
  if (class_names.size() != counts.classes())
    throw std::invalid_argument("class name count does not match the confusion counts");
  ExactMetrics exact = aggregate_exact(counts, average);
  MetricsReport r;
  r.threshold = threshold;
  r.class_average = average == ClassAverage::Macro ? "macro" : "literal_double_sum";
  r.samples = counts.samples();
  r.classes = counts.classes();
  for (std::size_t k = 0; k < counts.classes(); ++k)
    r.per_class.push_back({class_names[k], to_double(exact.per_class[k].precision),
                           to_double(exact.per_class[k].recall), counts.at(k)});
  r.cp = to_double(exact.cp);
  r.cr = to_double(exact.cr);
  r.cf1 = to_double(exact.cf1);
  r.op = to_double(exact.op);
  if (exact.overall_recall) r.overall_recall = to_double(*exact.overall_recall);
  if (exact.of1) r.of1 = to_double(*exact.of1);
  r.micro_precision = to_double(exact.micro_precision);
  r.micro_recall = to_double(exact.micro_recall);
  r.micro_f1 = to_double(exact.micro_f1);
  return r;
}

nlohmann::ordered_json report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (const auto& c : r.per_class) {
    classes.push_back({{"name", c.name},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"tp", c.counts.tp},
                       {"fp", c.counts.fp},
                       {"fn", c.counts.fn},
                       {"tn", c.counts.tn}});
  }
  return {{"dataset", r.dataset},
          {"config_hash", r.config_hash},
          {"threshold", r.threshold},
          {"class_average", r.class_average},
          {"samples", r.samples},
          {"classes", r.classes},
          {"per_class", classes},
          {"CP", r.cp},
          {"CR", r.cr},
          {"CF1", r.cf1},
          {"OP", r.op},
          {"OR", optional_number(r.overall_recall)},
          {"OF1", optional_number(r.of1)},
          {"micro_precision", r.micro_precision},
          {"micro_recall", r.micro_recall},
          {"micro_f1", r.micro_f1}};
}

MetricsReport report_from_json(const nlohmann::json& j) {
  MetricsReport r;
  r.dataset = j.at("dataset").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.threshold = j.at("threshold").get<double>();
  r.class_average = j.at("class_average").get<std::string>();
  r.samples = j.at("samples").get<std::uint64_t>();
  r.classes = j.at("classes").get<std::uint64_t>();
  for (const auto& c : j.at("per_class")) {
    ClassMetrics m;
    m.name = c.at("name").get<std::string>();
    m.precision = c.at("precision").get<double>();
    m.recall = c.at("recall").get<double>();
    m.counts = {c.at("tp").get<std::uint64_t>(), c.at("fp").get<std::uint64_t>(), c.at("fn").get<std::uint64_t>(),
                c.at("tn").get<std::uint64_t>()};
    r.per_class.push_back(std::move(m));
  }
  r.cp = j.at("CP").get<double>();
  r.cr = j.at("CR").get<double>();
  r.cf1 = j.at("CF1").get<double>();
  r.op = j.at("OP").get<double>();
  r.overall_recall = read_optional(j, "OR");
  r.of1 = read_optional(j, "OF1");
  r.micro_precision = j.at("micro_precision").get<double>();
  r.micro_recall = j.at("micro_recall").get<double>();
  r.micro_f1 = j.at("micro_f1").get<double>();
  return r;
}

std::string emit_report(const MetricsReport& report) { return report_to_json(report).dump(2) + "\n"; }

}  // namespace maskct::metrics
