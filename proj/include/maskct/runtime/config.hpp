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
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "maskct/model/model.hpp"
#include "maskct/train/trainer.hpp"

namespace maskct::runtime {

// Environment variable naming the root for relative output and checkpoint paths.
inline constexpr const char* kHomeVariable = "MASKCT_HOME";

// Resolves a relative path against $MASKCT_HOME when it is set.
std::filesystem::path resolve_home_path(const std::filesystem::path& p);

using ConfigValue = std::variant<std::int64_t, double, bool, std::string>;

struct ConfigEntry {
  ConfigValue value;
  std::string origin;  // "file:line" or "override"
};

// Flat "section.key" -> value view of a TOML-like file:
//   # comment
//   [section]
//   key = 12 | 1.5e-3 | true | "text"
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text, const std::string& source = "<config>");
  static ConfigDocument load(const std::filesystem::path& path);

  // "section.key=value"; unquoted text that is not a number or boolean is taken as a string.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, ConfigValue value, const std::string& origin);

  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
  bool contains(const std::string& key) const { return entries_.count(key) != 0; }

 private:
  std::map<std::string, ConfigEntry> entries_;
};

struct DataPaths {
  std::string train_manifest;
  std::string val_manifest;
  std::string test_manifest;
  std::string vocabulary;
};

// Everything a run depends on. Serialized into every artifact it produces.
struct RunConfig {
  model::ModelConfig model;
  train::TrainConfig train;
  DataPaths data;
  std::string pretrained;  // optional backbone weights container
  std::string device = "cpu";
  std::string output_dir = "runs/default";
  std::uint64_t seed = 0;
  unsigned threads = 0;

  // Throws ConfigError naming the offending field path.
  void validate() const;
  nlohmann::ordered_json to_json() const;
  // FNV-1a over the canonical JSON form.
  std::string hash() const;
};

struct SchemaField {
  std::string key;
  std::string type;  // "int", "float", "bool", "string"
  std::string description;
};

const std::vector<SchemaField>& config_schema();

// Unknown keys and type mismatches raise ConfigError with the field path and origin.
RunConfig build_run_config(const ConfigDocument& doc);
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace maskct::runtime
