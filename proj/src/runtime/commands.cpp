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

#include "maskct/runtime/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "maskct/augment/mask1.hpp"
#include "maskct/backbone/extractor.hpp"
#include "maskct/core/error.hpp"
#include "maskct/core/hash.hpp"
#include "maskct/data/dataset.hpp"
#include "maskct/data/image_io.hpp"
#include "maskct/data/video.hpp"
#include "maskct/encoder/classifier.hpp"
#include "maskct/io/tensor_container.hpp"
#include "maskct/metrics/report.hpp"
#include "maskct/model/checkpoint.hpp"
#include "maskct/runtime/bench.hpp"
#include "maskct/runtime/config.hpp"
#include "maskct/train/trainer.hpp"

namespace maskct::runtime {

namespace {

constexpr std::uint64_t kModelInitStream = 0x696e6974;

void emit(std::ostream& out, const std::optional<std::filesystem::path>& path, const std::string& text) {
  if (path) {
    if (path->has_parent_path()) std::filesystem::create_directories(path->parent_path());
    io::write_file_atomic(*path, text);
  }
  out << text;
}

std::string checkpoint_hash(const model::Checkpoint& ckpt) {
  auto it = ckpt.metadata.find("config_hash");
  return it == ckpt.metadata.end() ? std::string() : it->second;
}

// Refuses manifests whose label space differs from the checkpoint's.
void check_vocabulary(const data::DatasetManifest& manifest, const labels::LabelVocabulary& vocab,
                      const std::filesystem::path& manifest_path) {
  if (manifest.labels != vocab.size())
    throw DataError("vocabulary mismatch: " + manifest_path.string() + " has " + std::to_string(manifest.labels) +
                    " labels, checkpoint has " + std::to_string(vocab.size()));
  if (manifest.vocabulary.empty()) return;
  std::filesystem::path vpath(manifest.vocabulary);
  if (vpath.is_relative()) vpath = manifest_path.parent_path() / vpath;
  if (!std::filesystem::exists(vpath)) throw DataError("manifest vocabulary not found: " + vpath.string());
  if (labels::LabelVocabulary::load(vpath) != vocab)
    throw DataError("vocabulary mismatch between checkpoint and " + vpath.string());
}

data::DatasetManifest read_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("manifest not found: " + path.string());
  return data::DatasetManifest::read(path);
}

}  // namespace

int cmd_train(const TrainArgs& args, std::ostream& out) {
  std::vector<std::string> overrides = args.overrides;
  if (args.max_epochs) overrides.push_back("train.max_epochs=" + std::to_string(*args.max_epochs));
  if (args.output_dir) overrides.push_back("run.output_dir=\"" + args.output_dir->string() + "\"");
  RunConfig cfg = load_run_config(args.config, overrides);
  if (cfg.data.train_manifest.empty()) throw ConfigError("data.train_manifest: must be set");
  if (cfg.data.val_manifest.empty()) throw ConfigError("data.val_manifest: must be set");
  auto train_manifest = read_manifest(cfg.data.train_manifest);
  auto val_manifest = read_manifest(cfg.data.val_manifest);

  labels::LabelVocabulary vocab;
  if (!cfg.data.vocabulary.empty()) {
    vocab = labels::LabelVocabulary::load(cfg.data.vocabulary);
  } else {
    std::vector<std::string> names;
    for (int i = 0; i < cfg.model.num_labels; ++i) names.push_back("class" + std::to_string(i));
    vocab = labels::LabelVocabulary(names);
  }
  for (const auto* m : {&train_manifest, &val_manifest})
    if (m->labels != vocab.size())
      throw DataError("manifest has " + std::to_string(m->labels) + " labels but the vocabulary has " +
                      std::to_string(vocab.size()));

  const std::string hash = cfg.hash();
  model::MaskCtModel model(cfg.model, derive_seed(cfg.seed, {kModelInitStream}));
  if (!cfg.pretrained.empty()) {
    auto report = backbone::load_pretrained_weights(cfg.pretrained, model.extractor().network(), model.parameters());
    spdlog::info("loaded {} backbone tensors, checksum {}", report.tensors, report.checksum);
  }

  const auto out_dir = resolve_home_path(cfg.output_dir);
  std::filesystem::create_directories(out_dir);
  nlohmann::ordered_json snapshot = {{"config_hash", hash}, {"config", cfg.to_json()}};
  io::write_file_atomic(out_dir / "run_config.json", snapshot.dump(2) + "\n");

  train::LoopOptions options;
  options.output_dir = out_dir;
  options.vocabulary = vocab;
  options.config_hash = hash;
  options.config_json = cfg.to_json().dump();
  options.resume = args.resume;
  data::ManifestSource train_source(train_manifest);
  data::ManifestSource val_source(val_manifest);
  train::LoopResult result = train::train_loop(model, train_source, val_source, cfg.train, options);

  nlohmann::ordered_json summary = {
      {"config_hash", hash},
      {"epochs", result.history.size()},
      {"best_cf1", result.best_metric ? nlohmann::ordered_json(*result.best_metric) : nlohmann::ordered_json(nullptr)},
      {"best_checkpoint", result.best_checkpoint.string()},
      {"last_checkpoint", result.last_checkpoint.string()},
      {"history", result.history_path.string()}};
  out << summary.dump(2) << '\n';
  return kOk;
}

int cmd_eval(const EvalArgs& args, std::ostream& out) {
  model::Checkpoint ckpt = model::load_checkpoint(args.checkpoint);
  auto manifest = read_manifest(args.manifest);
  if (!args.split.empty()) manifest = manifest.filter(data::parse_split(args.split));
  if (manifest.records.empty()) throw DataError("no records to evaluate in " + args.manifest.string());
  check_vocabulary(manifest, ckpt.vocabulary, args.manifest);
  data::ManifestSource source(manifest);
  train::Evaluation ev = train::evaluate(ckpt.model, source, args.threshold, args.threads);
  metrics::MetricsReport report = metrics::aggregate(ev.counts, ckpt.vocabulary.names(), args.threshold);
  report.dataset = args.manifest.filename().string() + (args.split.empty() ? "" : ":" + args.split);
  report.config_hash = checkpoint_hash(ckpt);
  emit(out, args.output, metrics::emit_report(report));
  return kOk;
}

int cmd_predict(const PredictArgs& args, std::ostream& out) {
  model::Checkpoint ckpt = model::load_checkpoint(args.checkpoint);
  if (args.images.empty()) throw ConfigError("predict.image: at least one image is required");
  const auto& vocab = ckpt.vocabulary;
  std::map<std::size_t, bool> pinned;
  for (const auto& e : args.evidence) {
    const auto eq = e.find('=');
    if (eq == std::string::npos) throw ConfigError("predict.evidence: '" + e + "' must look like label=0 or label=1");
    const auto idx = vocab.index_of(e.substr(0, eq));
    if (!idx) throw ConfigError("predict.evidence: unknown label '" + e.substr(0, eq) + "'");
    const std::string v = e.substr(eq + 1);
    if (v != "0" && v != "1") throw ConfigError("predict.evidence: value for '" + e.substr(0, eq) + "' must be 0 or 1");
    pinned[*idx] = v == "1";
  }
  const auto lsv = labels::with_evidence(vocab.size(), pinned);
  const data::PrepareConfig prep{ckpt.model.config().wfe.input_size, 0.0};
  nlohmann::ordered_json preds = nlohmann::ordered_json::array();
  for (const auto& path : args.images) {
    ImagePlane img = data::prepare_sample(data::decode_image(path), data::PrepareMode::Eval, prep);
    Eigen::VectorXd p = encoder::sigmoid(ckpt.model.forward(img, lsv));
    nlohmann::ordered_json probs;
    nlohmann::ordered_json positive = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < vocab.size(); ++k) {
      probs[vocab.name(k)] = p[static_cast<Eigen::Index>(k)];
      if (p[static_cast<Eigen::Index>(k)] >= args.threshold) positive.push_back(vocab.name(k));
    }
    preds.push_back({{"image", path.string()}, {"probabilities", probs}, {"labels", positive}});
  }
  nlohmann::ordered_json doc = {
      {"config_hash", checkpoint_hash(ckpt)}, {"threshold", args.threshold}, {"predictions", preds}};
  emit(out, args.output, doc.dump(2) + "\n");
  return kOk;
}

int cmd_bench(const BenchArgs& args, std::ostream& out) {
  model::Checkpoint ckpt = model::load_checkpoint(args.checkpoint);
  if (args.subsets.empty()) throw ConfigError("bench.subset: at least one name=manifest pair is required");
  std::vector<std::unique_ptr<data::ManifestSource>> sources;
  std::vector<BenchSubset> subsets;
  for (const auto& s : args.subsets) {
    const auto eq = s.find('=');
    const std::string name = eq == std::string::npos ? std::filesystem::path(s).stem().string() : s.substr(0, eq);
    const std::filesystem::path path = eq == std::string::npos ? s : s.substr(eq + 1);
    auto manifest = read_manifest(path);
    if (manifest.records.empty()) throw DataError("frame stream " + path.string() + " is empty");
    check_vocabulary(manifest, ckpt.vocabulary, path);
    sources.push_back(std::make_unique<data::ManifestSource>(std::move(manifest)));
    subsets.push_back({name, sources.back().get()});
  }
  std::vector<BenchMode> modes;
  if (args.mode == "model" || args.mode == "both") modes.push_back(BenchMode::Model);
  if (args.mode == "e2e" || args.mode == "end_to_end" || args.mode == "both") modes.push_back(BenchMode::EndToEnd);
  if (modes.empty()) throw ConfigError("bench.mode: expected model, e2e or both");

  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  for (BenchMode mode : modes) {
    BenchOptions opt;
    opt.mode = mode;
    opt.batch_size = args.batch_size;
    opt.deterministic = args.deterministic;
    opt.queue_capacity = args.queue_capacity;
    opt.threshold = args.threshold;
    opt.threads = args.threads;
    BenchResult r = run_bench(ckpt.model, subsets, ckpt.vocabulary.names(), opt);
    r.config_hash = checkpoint_hash(ckpt);
    results.push_back(bench_to_json(r));
  }
  nlohmann::ordered_json doc = {{"config_hash", checkpoint_hash(ckpt)}, {"results", results}};
  emit(out, args.output, doc.dump(2) + "\n");
  return kOk;
}

int cmd_augment_preview(const AugmentPreviewArgs& args, std::ostream& out) {
  ImagePlane img = data::decode_image(args.image);
  augment::Mask1Params params;
  params.fragments = args.fragments;
  params.beta_range = args.beta_range;
  params.alpha_range = args.alpha_range;
  augment::MaskConfig mask;
  mask.box = args.box;
  try {
    mask.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("augment.box: ") + e.what());
  }
  if (args.fragments < 1) throw ConfigError("augment.fragments: must be at least 1");
  augment::Mask1Result res = augment::run_mask1(img, params, mask, args.seed, augment::Mode::Train);

  std::filesystem::create_directories(args.output_dir);
  nlohmann::ordered_json settings = {{"seed", args.seed},
                                     {"fragments", args.fragments},
                                     {"box", args.box},
                                     {"occluder", mask.patch()},
                                     {"stride", mask.stride()},
                                     {"beta_range", args.beta_range},
                                     {"alpha_range", args.alpha_range}};
  auto rect = [](const Rect& r) {
    return nlohmann::ordered_json{{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
  };
  nlohmann::ordered_json frags = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    const auto& t = res.trace[i];
    const std::string pre = "fragment_" + std::to_string(i) + "_pre.png";
    const std::string post = "fragment_" + std::to_string(i) + "_masked.png";
    data::write_png(args.output_dir / pre, res.adjusted[i]);
    data::write_png(args.output_dir / post, res.masked[i]);
    nlohmann::ordered_json occ = nlohmann::ordered_json::array();
    for (const auto& o : t.occluders) occ.push_back(rect(o));
    nlohmann::ordered_json f = {{"index", i}, {"region", rect(t.region)}, {"photometric", t.photometric}};
    if (t.photometric)
      f["photometric_params"] = {{"beta", t.params.beta}, {"threshold", t.params.threshold}, {"alpha", t.params.alpha}};
    f["occluders"] = occ;
    f["pre"] = pre;
    f["masked"] = post;
    frags.push_back(f);
  }
  data::write_png(args.output_dir / "selected.png", res.output);
  nlohmann::ordered_json sidecar = {{"image", args.image.filename().string()},
                                    {"config_hash", fnv1a_hex(settings.dump())},
                                    {"params", settings},
                                    {"selected", res.selected},
                                    {"fragments", frags},
                                    {"output", "selected.png"}};
  const std::string text = sidecar.dump(2) + "\n";
  io::write_file_atomic(args.output_dir / "sidecar.json", text);
  out << text;
  return kOk;
}

int cmd_split(const SplitArgs& args, std::ostream& out) {
  auto manifest = read_manifest(args.manifest);
  if (args.ratios.size() != 3) throw ConfigError("split.ratios: expected three values (train, val, test)");
  if (args.binarize) {
    for (auto& r : manifest.records) {
      if (!r.intensities) throw DataError("record " + r.path + " has no intensities to binarize");
      r.bits = data::binarize_transient(*r.intensities);
    }
  }
  std::filesystem::create_directories(args.output_dir);
  const bool relocate = std::filesystem::weakly_canonical(args.output_dir) != std::filesystem::weakly_canonical(manifest.base_dir);
  if (relocate)
    for (auto& r : manifest.records) r.path = std::filesystem::absolute(manifest.resolve(r)).string();
  if (relocate && !manifest.vocabulary.empty() && std::filesystem::path(manifest.vocabulary).is_relative())
    manifest.vocabulary = std::filesystem::absolute(manifest.base_dir / manifest.vocabulary).string();
  data::SplitRatios ratios{args.ratios[0], args.ratios[1], args.ratios[2]};
  data::SplitResult split;
  try {
    split = data::split_dataset(manifest, ratios, args.seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("split.ratios: ") + e.what());
  }
  split.train.write(args.output_dir / "train.jsonl");
  split.val.write(args.output_dir / "val.jsonl");
  split.test.write(args.output_dir / "test.jsonl");
  nlohmann::ordered_json summary = {{"seed", args.seed},
                                    {"train", split.train.records.size()},
                                    {"val", split.val.records.size()},
                                    {"test", split.test.records.size()},
                                    {"output_dir", args.output_dir.string()}};
  out << summary.dump(2) << '\n';
  return kOk;
}

int cmd_ingest_video(const IngestVideoArgs& args, std::ostream& out) {
  std::ifstream in(args.spec);
  if (!in) throw DataError("clip spec not found: " + args.spec.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("clip spec " + args.spec.string() + ": " + e.what());
  }
  data::VideoClipSpec spec;
  try {
    spec = data::VideoClipSpec::from_json(j, args.spec.parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("clip spec " + args.spec.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("clip spec " + args.spec.string() + ": " + e.what());
  }
  const auto frames_dir =
      args.frames_dir ? *args.frames_dir : args.output.parent_path() / (spec.name.empty() ? "frames" : spec.name + "_frames");
  data::FrameExtraction ex = data::extract_frames(spec, frames_dir);
  ex.manifest.vocabulary = j.value("vocabulary", "");
  if (args.output.has_parent_path()) std::filesystem::create_directories(args.output.parent_path());
  ex.manifest.write(args.output);
  nlohmann::ordered_json summary = {{"clip", spec.name},
                                    {"frames_total", ex.frames_total},
                                    {"records", ex.manifest.records.size()},
                                    {"unlabeled", ex.unlabeled.size()},
                                    {"width", ex.width},
                                    {"height", ex.height},
                                    {"manifest", args.output.string()}};
  out << summary.dump(2) << '\n';
  return kOk;
}

}  // namespace maskct::runtime
