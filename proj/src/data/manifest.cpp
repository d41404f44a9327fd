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

#include "maskct/data/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "maskct/core/error.hpp"
#include "maskct/core/rng.hpp"
#include "maskct/io/tensor_container.hpp"

namespace maskct::data {

const char* to_string(Split s) {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::Val:
      return "val";
    case Split::Test:
      return "test";
    case Split::Unassigned:
      return "none";
  }
  return "none";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  if (s == "none" || s.empty()) return Split::Unassigned;
  throw DataError("unknown split tag '" + s + "'");
}

DatasetManifest DatasetManifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("manifest not found: " + path.string());
  DatasetManifest m;
  m.base_dir = path.parent_path();
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    try {
      if (!header_seen && j.contains("manifest")) {
        header_seen = true;
        m.vocabulary = j.value("vocabulary", "");
        m.labels = j.at("labels").get<std::size_t>();
        continue;
      }
      ManifestRecord r;
      r.path = j.at("path").get<std::string>();
      r.bits = j.at("bits").get<std::vector<std::uint8_t>>();
      r.split = parse_split(j.value("split", "none"));
      r.source = j.value("source", "");
      if (j.contains("intensities")) r.intensities = j.at("intensities").get<std::vector<double>>();
      if (j.contains("frame")) r.frame = j.at("frame").get<std::int64_t>();
      m.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header_seen && !m.records.empty()) m.labels = m.records.front().bits.size();
  m.validate();
  return m;
}

void DatasetManifest::write(const std::filesystem::path& path) const {
  validate();
  std::ostringstream out;
  nlohmann::ordered_json header = {{"manifest", 1}, {"vocabulary", vocabulary}, {"labels", labels}};
  out << header.dump() << '\n';
  for (const auto& r : records) {
    nlohmann::ordered_json j = {{"path", r.path}, {"bits", r.bits}, {"split", to_string(r.split)}, {"source", r.source}};
    if (r.intensities) j["intensities"] = *r.intensities;
    if (r.frame) j["frame"] = *r.frame;
    out << j.dump() << '\n';
  }
  io::write_file_atomic(path, out.str());
}

void DatasetManifest::validate() const {
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.path).second) throw DataError("duplicate manifest path: " + r.path);
    if (r.bits.size() != labels)
      throw DataError("record " + r.path + " has " + std::to_string(r.bits.size()) + " bits, expected " +
                      std::to_string(labels));
    for (auto b : r.bits)
      if (b > 1) throw DataError("record " + r.path + " has a non-binary label bit");
    if (r.intensities && r.intensities->size() != labels)
      throw DataError("record " + r.path + " has a mismatched intensity vector");
  }
}

DatasetManifest DatasetManifest::filter(Split split) const {
  DatasetManifest out;
  out.vocabulary = vocabulary;
  out.labels = labels;
  out.base_dir = base_dir;
  for (const auto& r : records)
    if (r.split == split) out.records.push_back(r);
  return out;
}

std::filesystem::path DatasetManifest::resolve(const ManifestRecord& record) const {
  std::filesystem::path p(record.path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

std::vector<std::uint8_t> binarize_transient(std::span<const double> intensities) {
  std::vector<std::uint8_t> bits(intensities.size());
  for (std::size_t i = 0; i < intensities.size(); ++i) {
    const double v = intensities[i];
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("attribute intensity out of [0, 1]: " + std::to_string(v));
    bits[i] = v >= 0.5 ? 1 : 0;
  }
  return bits;
}

SplitResult split_dataset(const DatasetManifest& manifest, const SplitRatios& ratios, std::uint64_t seed) {
  const std::size_t n = manifest.records.size();
  if (n == 0) throw DataError("cannot split an empty manifest");
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must be non-negative and sum to 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(ratios.train * n)));
  const auto n_val = std::min<std::size_t>(n - n_train, static_cast<std::size_t>(std::llround(ratios.val * n)));
  SplitResult out;
  for (DatasetManifest* m : {&out.train, &out.val, &out.test}) {
    m->vocabulary = manifest.vocabulary;
    m->labels = manifest.labels;
    m->base_dir = manifest.base_dir;
  }
  for (std::size_t i = 0; i < n; ++i) {
    ManifestRecord r = manifest.records[order[i]];
    DatasetManifest* target = i < n_train ? &out.train : i < n_train + n_val ? &out.val : &out.test;
    r.split = i < n_train ? Split::Train : i < n_train + n_val ? Split::Val : Split::Test;
    target->records.push_back(std::move(r));
  }
  return out;
}

}  // namespace maskct::data
