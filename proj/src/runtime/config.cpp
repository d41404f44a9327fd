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

#include "maskct/runtime/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "maskct/core/error.hpp"
#include "maskct/core/hash.hpp"
#include "maskct/labels/label_state.hpp"

namespace maskct::runtime {

std::filesystem::path resolve_home_path(const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  const char* home = std::getenv(kHomeVariable);
  if (!home || !*home) return p;
  return std::filesystem::path(home) / p;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::optional<ConfigValue> parse_scalar(const std::string& raw) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
      out.push_back(raw[i]);
    }
    return out;
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  std::int64_t iv = 0;
  auto [ip, iec] = std::from_chars(raw.data(), raw.data() + raw.size(), iv);
  if (iec == std::errc() && ip == raw.data() + raw.size()) return iv;
  if (!raw.empty()) {
    char* end = nullptr;
    const double dv = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() + raw.size()) return dv;
  }
  return std::nullopt;
}

std::string describe(const ConfigValue& v) {
  if (std::holds_alternative<std::int64_t>(v)) return "integer " + std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<double>(v)) return "number " + std::to_string(std::get<double>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "boolean true" : "boolean false";
  return "string \"" + std::get<std::string>(v) + "\"";
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& source) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string origin = source + ":" + std::to_string(lineno);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(origin + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ": missing key");
    const std::string path = section.empty() ? key : section + "." + key;
    auto value = parse_scalar(raw);
    if (!value) throw ConfigError(path + ": cannot parse value '" + raw + "' (" + origin + ")");
    if (doc.entries_.count(path)) throw ConfigError(path + ": set twice (" + origin + ")");
    doc.entries_[path] = ConfigEntry{*value, origin};
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void ConfigDocument::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like section.key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string raw = trim(assignment.substr(eq + 1));
  auto value = parse_scalar(raw);
  set(key, value ? *value : ConfigValue(raw), "override");
}

void ConfigDocument::set(const std::string& key, ConfigValue value, const std::string& origin) {
  entries_[key] = ConfigEntry{std::move(value), origin};
}

namespace {

using Setter = std::function<void(RunConfig&, const ConfigValue&)>;

struct FieldSpec {
  SchemaField field;
  Setter set;
};

std::int64_t as_int(const ConfigValue& v) {
  if (auto p = std::get_if<std::int64_t>(&v)) return *p;
  throw std::invalid_argument("expected an integer");
}
double as_float(const ConfigValue& v) {
  if (auto p = std::get_if<double>(&v)) return *p;
  if (auto p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
  throw std::invalid_argument("expected a number");
}
bool as_bool(const ConfigValue& v) {
  if (auto p = std::get_if<bool>(&v)) return *p;
  throw std::invalid_argument("expected true or false");
}
std::string as_string(const ConfigValue& v) {
  if (auto p = std::get_if<std::string>(&v)) return *p;
  throw std::invalid_argument("expected a quoted string");
}

#define MASKCT_INT(key, desc, expr) \
  FieldSpec{{key, "int", desc}, [](RunConfig& c, const ConfigValue& v) { expr = static_cast<decltype(expr)>(as_int(v)); }}
#define MASKCT_FLOAT(key, desc, expr) \
  FieldSpec{{key, "float", desc}, [](RunConfig& c, const ConfigValue& v) { expr = as_float(v); }}
#define MASKCT_BOOL(key, desc, expr) \
  FieldSpec{{key, "bool", desc}, [](RunConfig& c, const ConfigValue& v) { expr = as_bool(v); }}
#define MASKCT_STRING(key, desc, expr) \
  FieldSpec{{key, "string", desc}, [](RunConfig& c, const ConfigValue& v) { expr = as_string(v); }}

const std::vector<FieldSpec>& field_specs() {
  static const std::vector<FieldSpec> specs = {
      MASKCT_INT("model.backbone_depth", "residual network depth: 18, 34, 50, 101 or 152", c.model.wfe.backbone.depth),
      MASKCT_INT("model.backbone_stages", "residual stages kept after the stem (1-4)", c.model.wfe.backbone.stages),
      MASKCT_INT("model.backbone_width", "stem channel width (64 for the standard network)",
                 c.model.wfe.backbone.base_width),
      MASKCT_INT("model.input_size", "square input side in pixels", c.model.wfe.input_size),
      MASKCT_INT("model.num_labels", "class count (taken from the vocabulary when omitted)", c.model.num_labels),
      MASKCT_INT("model.d_model", "encoder width", c.model.encoder.d_model),
      MASKCT_INT("model.heads", "attention heads", c.model.encoder.heads),
      MASKCT_INT("model.layers", "encoder layers", c.model.encoder.layers),
      MASKCT_INT("model.ffn_width", "feed-forward hidden width", c.model.encoder.ffn_width),
      MASKCT_FLOAT("model.ffn_dropout", "dropout inside the feed-forward block", c.model.encoder.ffn_dropout),
      MASKCT_INT("model.fd_kernel", "odd kernel size of the feature-discovery convolution", c.model.fd_kernel),
      MASKCT_FLOAT("model.classifier_dropout", "dropout on the classifier input", c.model.classifier_dropout),
      MASKCT_BOOL("model.positional_embedding", "learned positions on feature tokens", c.model.positional_embedding),
      MASKCT_BOOL("model.freeze_backbone", "keep backbone weights fixed", c.model.freeze_backbone),
      MASKCT_STRING("model.pretrained", "backbone weights container (optional)", c.pretrained),
      MASKCT_FLOAT("train.lr", "initial learning rate", c.train.lr),
      MASKCT_FLOAT("train.adam_beta1", "Adam first-moment decay", c.train.adam.beta1),
      MASKCT_FLOAT("train.adam_beta2", "Adam second-moment decay", c.train.adam.beta2),
      MASKCT_INT("train.batch_size", "samples per optimizer step", c.train.batch_size),
      MASKCT_FLOAT("train.mask_ratio", "fraction of labels masked per sample", c.train.mask_ratio),
      FieldSpec{{"train.loss_scope", "string", "\"all\" or \"masked\""},
                [](RunConfig& c, const ConfigValue& v) {
                  const std::string s = as_string(v);
                  if (s == "all")
                    c.train.loss_scope = train::LossScope::AllLabels;
                  else if (s == "masked")
                    c.train.loss_scope = train::LossScope::MaskedOnly;
                  else
                    throw std::invalid_argument("expected \"all\" or \"masked\"");
                }},
      MASKCT_INT("train.max_epochs", "epoch bound", c.train.max_epochs),
      MASKCT_FLOAT("train.plateau_factor", "learning-rate multiplier on plateau", c.train.plateau.factor),
      MASKCT_INT("train.plateau_patience", "epochs without CF1 improvement before reducing", c.train.plateau.patience),
      MASKCT_FLOAT("train.noise", "Gaussian noise sigma as a fraction of I_max", c.train.noise_fraction),
      MASKCT_INT("train.gradient_shards", "fixed gradient reduction shards", c.train.gradient_shards),
      MASKCT_FLOAT("train.threshold", "decision threshold for validation metrics", c.train.threshold),
      MASKCT_BOOL("mask1.enabled", "apply image masking during training", c.train.mask1_enabled),
      MASKCT_INT("mask1.fragments", "crops per image", c.train.mask1.fragments),
      MASKCT_FLOAT("mask1.beta_range", "contrast increment drawn from [-r, r]", c.train.mask1.beta_range),
      MASKCT_FLOAT("mask1.alpha_range", "light range drawn from [-r, r]", c.train.mask1.alpha_range),
      FieldSpec{{"mask1.threshold", "float", "contrast pivot T (default I_max / 2)"},
                [](RunConfig& c, const ConfigValue& v) { c.train.mask1.threshold = as_float(v); }},
      MASKCT_FLOAT("mask1.crop_min", "smallest crop side as a fraction of min(H, W)", c.train.mask1.crop.scale_min),
      MASKCT_FLOAT("mask1.crop_max", "largest crop side as a fraction of min(H, W)", c.train.mask1.crop.scale_max),
      MASKCT_FLOAT("mask1.photometric_fraction", "share of crops given the photometric pass",
                   c.train.mask1.crop.photometric_fraction),
      MASKCT_INT("mask1.box", "scan window side D (even)", c.train.mask.box),
      MASKCT_FLOAT("mask1.fill", "occluder intensity", c.train.mask.fill),
      MASKCT_STRING("data.train_manifest", "training manifest", c.data.train_manifest),
      MASKCT_STRING("data.val_manifest", "validation manifest", c.data.val_manifest),
      MASKCT_STRING("data.test_manifest", "test manifest (optional)", c.data.test_manifest),
      MASKCT_STRING("data.vocabulary", "label vocabulary file", c.data.vocabulary),
      MASKCT_INT("run.seed", "base random seed", c.seed),
      MASKCT_INT("run.threads", "worker threads (0 = all cores)", c.threads),
      MASKCT_STRING("run.device", "compute device (\"cpu\")", c.device),
      MASKCT_STRING("run.output_dir", "artifact directory (relative to $MASKCT_HOME when set)", c.output_dir),
  };
  return specs;
}

#undef MASKCT_INT
#undef MASKCT_FLOAT
#undef MASKCT_BOOL
#undef MASKCT_STRING

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field + ": " + message);
}

}  // namespace

const std::vector<SchemaField>& config_schema() {
  static const std::vector<SchemaField> schema = [] {
    std::vector<SchemaField> out;
    for (const auto& s : field_specs()) out.push_back(s.field);
    return out;
  }();
  return schema;
}

void RunConfig::validate() const {
  const auto& b = model.wfe.backbone;
  check(b.depth == 18 || b.depth == 34 || b.depth == 50 || b.depth == 101 || b.depth == 152, "model.backbone_depth",
        "must be one of 18, 34, 50, 101, 152");
  check(b.stages >= 1 && b.stages <= 4, "model.backbone_stages", "must be in [1, 4]");
  check(b.base_width >= 1, "model.backbone_width", "must be positive");
  check(model.wfe.input_size >= 1 && model.wfe.input_size % b.stride() == 0, "model.input_size",
        "must be a positive multiple of the backbone stride " + std::to_string(b.stride()));
  check(model.num_labels >= 1, "model.num_labels", "must be at least 1");
  check(model.encoder.d_model >= 1, "model.d_model", "must be positive");
  check(model.encoder.heads >= 1, "model.heads", "must be positive");
  check(model.encoder.d_model % model.encoder.heads == 0, "model.d_model", "must be divisible by model.heads");
  check(model.encoder.layers >= 1, "model.layers", "must be positive");
  check(model.encoder.ffn_width >= 1, "model.ffn_width", "must be positive");
  check(model.encoder.ffn_dropout >= 0.0 && model.encoder.ffn_dropout < 1.0, "model.ffn_dropout", "must be in [0, 1)");
  check(model.fd_kernel >= 1 && model.fd_kernel % 2 == 1, "model.fd_kernel", "must be a positive odd number");
  check(model.classifier_dropout >= 0.0 && model.classifier_dropout < 1.0, "model.classifier_dropout",
        "must be in [0, 1)");
  check(device == "cpu", "run.device", "only \"cpu\" is supported");
  check(!output_dir.empty(), "run.output_dir", "must not be empty");
  check(train.mask1.crop.scale_min > 0.0 && train.mask1.crop.scale_min <= train.mask1.crop.scale_max &&
            train.mask1.crop.scale_max <= 1.0,
        "mask1.crop_min", "crop scales must satisfy 0 < crop_min <= crop_max <= 1");
  check(train.mask1.crop.photometric_fraction >= 0.0 && train.mask1.crop.photometric_fraction <= 1.0,
        "mask1.photometric_fraction", "must be in [0, 1]");
  check(train.mask1.beta_range >= 0.0, "mask1.beta_range", "must be non-negative");
  check(train.mask1.alpha_range >= 0.0 && train.mask1.alpha_range < 1.0, "mask1.alpha_range", "must be in [0, 1)");
  train.validate();
}

nlohmann::ordered_json RunConfig::to_json() const {
  return {{"model", model.to_json()},
          {"train", train.to_json()},
          {"mask1",
           {{"crop_min", train.mask1.crop.scale_min},
            {"crop_max", train.mask1.crop.scale_max},
            {"photometric_fraction", train.mask1.crop.photometric_fraction},
            {"threshold", train.mask1.threshold ? nlohmann::ordered_json(*train.mask1.threshold)
                                                : nlohmann::ordered_json(nullptr)},
            {"fill", train.mask.fill}}},
          {"data",
           {{"train_manifest", data.train_manifest},
            {"val_manifest", data.val_manifest},
            {"test_manifest", data.test_manifest},
            {"vocabulary", data.vocabulary}}},
          {"pretrained", pretrained},
          {"device", device},
          {"output_dir", output_dir},
          {"seed", seed},
          {"threads", threads}};
}

std::string RunConfig::hash() const { return fnv1a_hex(to_json().dump()); }

RunConfig build_run_config(const ConfigDocument& doc) {
  RunConfig cfg;
  std::map<std::string, const FieldSpec*> index;
  for (const auto& s : field_specs()) index[s.field.key] = &s;
  for (const auto& [key, entry] : doc.entries()) {
    auto it = index.find(key);
    if (it == index.end()) throw ConfigError(key + ": unknown setting (" + entry.origin + ")");
    try {
      it->second->set(cfg, entry.value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what() + ", got " + describe(entry.value) + " (" + entry.origin + ")");
    }
  }
  if (!cfg.data.vocabulary.empty()) {
    const auto vocab_path = std::filesystem::path(cfg.data.vocabulary);
    if (!std::filesystem::exists(vocab_path)) throw ConfigError("data.vocabulary: file not found: " + cfg.data.vocabulary);
    const auto vocab = labels::LabelVocabulary::load(vocab_path);
    if (doc.contains("model.num_labels") && static_cast<std::size_t>(cfg.model.num_labels) != vocab.size())
      throw ConfigError("model.num_labels: " + std::to_string(cfg.model.num_labels) + " disagrees with the " +
                        std::to_string(vocab.size()) + " classes in " + cfg.data.vocabulary);
    cfg.model.num_labels = static_cast<int>(vocab.size());
  }
  cfg.train.seed = cfg.seed;
  cfg.train.threads = cfg.threads;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  ConfigDocument doc = ConfigDocument::load(path);
  for (const auto& o : overrides) doc.apply_override(o);
  const auto base = path.parent_path();
  for (const char* key : {"data.train_manifest", "data.val_manifest", "data.test_manifest", "data.vocabulary",
                          "model.pretrained"}) {
    if (!doc.contains(key)) continue;
    const auto& entry = doc.entries().at(key);
    if (auto s = std::get_if<std::string>(&entry.value); s && !s->empty() && std::filesystem::path(*s).is_relative() &&
                                                          entry.origin != "override")
      doc.set(key, (base / *s).lexically_normal().string(), entry.origin);
  }
  return build_run_config(doc);
}

}  // namespace maskct::runtime
