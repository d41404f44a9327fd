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

#include "maskct/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "maskct/core/error.hpp"
#include "maskct/core/parallel.hpp"
#include "maskct/data/image_io.hpp"
#include "maskct/encoder/classifier.hpp"
#include "maskct/io/tensor_container.hpp"
#include "maskct/model/checkpoint.hpp"
#include "maskct/train/loss.hpp"

namespace maskct::train {

namespace {

constexpr std::uint64_t kSampleStream = 0x7472;
constexpr std::uint64_t kShuffleStream = 0x7368;

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError("train." + field + ": " + message);
}

unsigned resolve_threads(unsigned threads) { return threads == 0 ? default_thread_count() : threads; }

std::vector<std::string> class_names(const labels::LabelVocabulary& vocab, std::size_t n) {
  if (vocab.size() == n) return vocab.names();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("class" + std::to_string(i));
  return names;
}

}  // namespace

void TrainConfig::validate() const {
  require(std::isfinite(lr) && lr >= 0.0, "lr", "must be a non-negative number");
  require(adam.beta1 >= 0.0 && adam.beta1 < 1.0, "adam_beta1", "must be in [0, 1)");
  require(adam.beta2 >= 0.0 && adam.beta2 < 1.0, "adam_beta2", "must be in [0, 1)");
  require(batch_size >= 1, "batch_size", "must be at least 1");
  require(mask_ratio >= 0.0 && mask_ratio <= 1.0, "mask_ratio", "must be in [0, 1]");
  require(noise_fraction >= 0.0, "noise", "must be non-negative");
  require(plateau.factor > 0.0 && plateau.factor < 1.0, "plateau_factor", "must be in (0, 1)");
  require(plateau.patience >= 1, "plateau_patience", "must be at least 1");
  require(max_epochs >= 0, "max_epochs", "must be non-negative");
  require(gradient_shards >= 1, "gradient_shards", "must be at least 1");
  require(threshold > 0.0 && threshold < 1.0, "threshold", "must be in (0, 1)");
  require(mask1.fragments >= 1, "fragments", "must be at least 1");
  require(mask.box >= 2 && mask.box % 2 == 0, "mask_box", "must be even and at least 2");
}

nlohmann::ordered_json TrainConfig::to_json() const {
  return {{"lr", lr},
          {"adam_beta1", adam.beta1},
          {"adam_beta2", adam.beta2},
          {"batch_size", batch_size},
          {"mask_ratio", mask_ratio},
          {"mask1", mask1_enabled},
          {"fragments", mask1.fragments},
          {"beta_range", mask1.beta_range},
          {"alpha_range", mask1.alpha_range},
          {"mask_box", mask.box},
          {"noise", noise_fraction},
          {"plateau_factor", plateau.factor},
          {"plateau_patience", plateau.patience},
          {"max_epochs", max_epochs},
          {"seed", seed},
          {"loss_scope", loss_scope == LossScope::AllLabels ? "all" : "masked"},
          {"gradient_shards", gradient_shards},
          {"threshold", threshold}};
}

TrainState initial_state(const model::MaskCtModel& model, const TrainConfig& config) {
  TrainState s;
  s.lr = config.lr;
  s.optimizer = Adam(model.parameters(), config.adam);
  return s;
}

StepResult train_step(model::MaskCtModel& model, TrainState& state, const data::SampleSource& source,
                      const std::vector<std::size_t>& batch, const TrainConfig& config) {
  if (batch.empty()) throw DataError("empty training batch");
  if (static_cast<int>(batch.size()) > config.batch_size)
    throw std::invalid_argument("batch larger than the configured batch size");
  const std::size_t B = batch.size();
  const std::size_t shards = std::min<std::size_t>(static_cast<std::size_t>(config.gradient_shards), B);
  const int size = model.config().wfe.input_size;
  const data::PrepareConfig prep{size, config.noise_fraction};
  const double inv_batch = 1.0 / static_cast<double>(B);

  std::vector<GradientSet> shard_grads(shards);
  std::vector<double> losses(B, 0.0);
  std::vector<std::string> ids(B);

  auto run_sample = [&](std::size_t i, GradientSet& grads) {
    const std::size_t index = batch[i];
    Rng rng = make_rng(config.seed, {kSampleStream, static_cast<std::uint64_t>(state.step), index});
    data::Sample sample = source.load(index);
    ids[i] = sample.id;
    ImagePlane img = data::prepare_sample(sample.image, data::PrepareMode::Train, prep, &rng);
    if (config.mask1_enabled) {
      img = data::resize_bilinear(augment::apply_mask1(img, config.mask1, config.mask, rng(), augment::Mode::Train),
                                  size, size);
      for (double& v : img.data()) v = quantize_intensity(v, img.max_intensity());
    }
    labels::LabelStateVector lsv = labels::sample_mask(sample.truth, config.mask_ratio, rng);
    model::ForwardCache cache;
    Eigen::VectorXd logits = model.forward(img, lsv, &cache, &rng);
    std::vector<std::uint8_t> include;
    if (config.loss_scope == LossScope::MaskedOnly) {
      include.resize(lsv.size());
      for (std::size_t k = 0; k < lsv.size(); ++k) include[k] = lsv.state[k] == labels::LabelState::Masked;
    }
    LossResult loss = bce_loss(logits, sample.truth, include);
    if (!std::isfinite(loss.value)) throw NumericalError("non-finite loss for sample " + sample.id);
    losses[i] = loss.value;
    model.backward(cache, loss.grad * inv_batch, grads);
  };

  auto diagnostics = [&] {
    std::ostringstream os;
    os << " (step " << state.step << ", lr " << state.lr << ", batch ids:";
    for (std::size_t i = 0; i < B; ++i) os << ' ' << (ids[i].empty() ? std::to_string(batch[i]) : ids[i]);
    os << ')';
    return os.str();
  };

  try {
    parallel_for(shards, resolve_threads(config.threads), [&](std::size_t s) {
      GradientSet grads(model.parameters());
      for (std::size_t i = s * B / shards; i < (s + 1) * B / shards; ++i) run_sample(i, grads);
      shard_grads[s] = std::move(grads);
    });
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + diagnostics());
  }

  GradientSet total = std::move(shard_grads[0]);
  for (std::size_t s = 1; s < shards; ++s) total.add(shard_grads[s]);
  double loss = 0.0;
  for (double l : losses) loss += l;
  loss *= inv_batch;
  if (!std::isfinite(loss) || !total.all_finite()) throw NumericalError("non-finite loss or gradient" + diagnostics());

  state.optimizer.step(model.parameters(), total, state.lr, [&](ParamId id) { return model.is_optimized(id); });
  ++state.step;
  return StepResult{loss, B};
}

Evaluation evaluate(const model::MaskCtModel& model, const data::SampleSource& source, double threshold,
                    unsigned threads) {
  const std::size_t n = source.size();
  if (n == 0) throw DataError("cannot evaluate an empty split");
  if (source.num_labels() != static_cast<std::size_t>(model.config().num_labels))
    throw DataError("dataset has " + std::to_string(source.num_labels()) + " labels, model expects " +
                    std::to_string(model.config().num_labels));
  const data::PrepareConfig prep{model.config().wfe.input_size, 0.0};
  Evaluation ev;
  ev.probabilities.resize(n);
  std::vector<double> losses(n);
  std::vector<std::vector<std::uint8_t>> truths(n);
  parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
    data::Sample s = source.load(i);
    ImagePlane img = data::prepare_sample(s.image, data::PrepareMode::Eval, prep);
    Eigen::VectorXd logits = model.forward(img, labels::all_masked(s.truth.size()));
    losses[i] = bce_loss(logits, s.truth).value;
    ev.probabilities[i] = encoder::sigmoid(logits);
    truths[i] = std::move(s.truth);
  });
  ev.counts = metrics::ConfusionCounts(source.num_labels());
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& p = ev.probabilities[i];
    ev.counts.add(truths[i], metrics::binarize(std::span<const double>(p.data(), p.size()), threshold));
    ev.loss += losses[i];
  }
  ev.loss /= static_cast<double>(n);
  return ev;
}

nlohmann::ordered_json EpochRecord::to_json() const {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  return {{"epoch", epoch},     {"loss", loss},           {"lr", lr},
          {"CP", metrics.cp},   {"CR", metrics.cr},       {"CF1", metrics.cf1},
          {"OP", metrics.op},   {"OR", opt(metrics.overall_recall)}, {"OF1", opt(metrics.of1)},
          {"config_hash", metrics.config_hash}};
}

namespace {

EpochRecord record_from_json(const nlohmann::json& j) {
  EpochRecord r;
  r.epoch = j.at("epoch").get<int>();
  r.loss = j.at("loss").get<double>();
  r.lr = j.at("lr").get<double>();
  r.metrics.cp = j.at("CP").get<double>();
  r.metrics.cr = j.at("CR").get<double>();
  r.metrics.cf1 = j.at("CF1").get<double>();
  r.metrics.op = j.at("OP").get<double>();
  if (!j.at("OR").is_null()) r.metrics.overall_recall = j.at("OR").get<double>();
  if (!j.at("OF1").is_null()) r.metrics.of1 = j.at("OF1").get<double>();
  r.metrics.config_hash = j.value("config_hash", "");
  return r;
}

void write_history(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
  std::string text;
  for (const auto& r : history) text += r.to_json().dump() + "\n";
  io::write_file_atomic(path, text);
}

std::vector<EpochRecord> read_history(const std::filesystem::path& path) {
  std::vector<EpochRecord> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(record_from_json(nlohmann::json::parse(line)));
  return out;
}

}  // namespace

void save_training_checkpoint(const std::filesystem::path& path, const model::MaskCtModel& model,
                              const TrainState& state, const LoopOptions& options) {
  nlohmann::ordered_json ts = {{"epoch", state.epoch},
                               {"step", state.step},
                               {"lr", state.lr},
                               {"best_metric", state.best_metric ? nlohmann::ordered_json(*state.best_metric)
                                                                 : nlohmann::ordered_json(nullptr)},
                               {"bad_epochs", state.bad_epochs},
                               {"adam_steps", state.optimizer.steps()}};
  std::map<std::string, std::string> meta{{"train_state", ts.dump()}, {"config_hash", options.config_hash}};
  if (!options.config_json.empty()) meta["run_config"] = options.config_json;
  std::vector<io::TensorRef> extra;
  const auto& m = state.optimizer.first_moments();
  const auto& v = state.optimizer.second_moments();
  for (ParamId id = 0; id < m.size(); ++id) {
    const std::string& name = model.parameters().at(id).name;
    if (!model.parameters().at(id).trainable) continue;
    extra.push_back({"optim.m." + name, &m[id]});
    extra.push_back({"optim.v." + name, &v[id]});
  }
  labels::LabelVocabulary vocab = options.vocabulary.size() == static_cast<std::size_t>(model.config().num_labels)
                                      ? options.vocabulary
                                      : labels::LabelVocabulary(class_names({}, model.config().num_labels));
  model::save_checkpoint(path, model, vocab, meta, extra);
}

TrainState load_training_state(const std::filesystem::path& path, model::MaskCtModel& model) {
  model::Checkpoint ckpt = model::load_checkpoint(path);
  if (ckpt.model.config().to_json() != model.config().to_json())
    throw ConfigError("checkpoint " + path.string() + " was written for a different model configuration");
  auto it = ckpt.metadata.find("train_state");
  if (it == ckpt.metadata.end()) throw DataError("checkpoint " + path.string() + " carries no training state");
  auto ts = nlohmann::json::parse(it->second);

  TrainState state;
  state.epoch = ts.at("epoch").get<int>();
  state.step = ts.at("step").get<std::int64_t>();
  state.lr = ts.at("lr").get<double>();
  if (!ts.at("best_metric").is_null()) state.best_metric = ts.at("best_metric").get<double>();
  state.bad_epochs = ts.at("bad_epochs").get<int>();
  state.optimizer = Adam(model.parameters(), AdamConfig{});
  state.optimizer.set_steps(ts.at("adam_steps").get<std::int64_t>());
  for (ParamId id = 0; id < model.parameters().size(); ++id) {
    Parameter& p = model.parameters().at(id);
    p.value = ckpt.model.parameters()[id];
    if (!p.trainable) continue;
    state.optimizer.first_moments()[id] = ckpt.container.matrix("optim.m." + p.name);
    state.optimizer.second_moments()[id] = ckpt.container.matrix("optim.v." + p.name);
  }
  return state;
}

LoopResult train_loop(model::MaskCtModel& model, const data::SampleSource& train_source,
                      const data::SampleSource& val_source, const TrainConfig& config, const LoopOptions& options) {
  config.validate();
  if (train_source.size() == 0) throw DataError("training split is empty");
  if (val_source.size() == 0) throw DataError("validation split is empty");
  const auto labels_expected = static_cast<std::size_t>(model.config().num_labels);
  if (train_source.num_labels() != labels_expected || val_source.num_labels() != labels_expected)
    throw DataError("dataset label count does not match the model");
  if (options.output_dir.empty()) throw ConfigError("train.output_dir: must be set");
  std::filesystem::create_directories(options.output_dir);

  LoopResult result;
  result.best_checkpoint = options.output_dir / "best.ckpt";
  result.last_checkpoint = options.output_dir / "last.ckpt";
  result.history_path = options.output_dir / "history.jsonl";
  const auto names = class_names(options.vocabulary, labels_expected);

  TrainState state;
  if (options.resume && std::filesystem::exists(result.last_checkpoint)) {
    state = load_training_state(result.last_checkpoint, model);
    state.optimizer = [&] {
      Adam a(model.parameters(), config.adam);
      a.set_steps(state.optimizer.steps());
      a.first_moments() = state.optimizer.first_moments();
      a.second_moments() = state.optimizer.second_moments();
      return a;
    }();
    result.history = read_history(result.history_path);
    if (result.history.size() > static_cast<std::size_t>(state.epoch)) result.history.resize(state.epoch);
    spdlog::info("resuming after epoch {} (step {}, lr {})", state.epoch, state.step, state.lr);
  } else {
    state = initial_state(model, config);
    write_history(result.history_path, {});
  }
  PlateauScheduler scheduler(state.lr, config.plateau);
  scheduler.restore(state.lr, state.best_metric, state.bad_epochs);

  if (state.epoch == 0 && config.max_epochs == 0) {
    save_training_checkpoint(result.best_checkpoint, model, state, options);
    save_training_checkpoint(result.last_checkpoint, model, state, options);
    return result;
  }

  const std::size_t n = train_source.size();
  for (int epoch = state.epoch + 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle = make_rng(config.seed, {kShuffleStream, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), shuffle);

    double loss_sum = 0.0;
    const double epoch_lr = state.lr;
    for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(n, begin + static_cast<std::size_t>(config.batch_size));
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                     order.begin() + static_cast<std::ptrdiff_t>(end));
      StepResult step = train_step(model, state, train_source, batch, config);
      loss_sum += step.loss * static_cast<double>(step.samples);
    }

    Evaluation ev = evaluate(model, val_source, config.threshold, config.threads);
    EpochRecord record;
    record.epoch = epoch;
    record.loss = loss_sum / static_cast<double>(n);
    record.lr = epoch_lr;
    record.metrics = metrics::aggregate(ev.counts, names, config.threshold);
    record.metrics.dataset = "val";
    record.metrics.config_hash = options.config_hash;
    if (!std::isfinite(record.metrics.cf1)) throw NumericalError("validation CF1 is not finite at epoch " + std::to_string(epoch));

    const bool improved = !state.best_metric || record.metrics.cf1 > *state.best_metric;
    if (scheduler.step(record.metrics.cf1)) spdlog::info("epoch {}: learning rate reduced to {}", epoch, scheduler.lr());
    state.lr = scheduler.lr();
    state.best_metric = scheduler.best();
    state.bad_epochs = scheduler.bad_epochs();
    state.epoch = epoch;
    if (improved) save_training_checkpoint(result.best_checkpoint, model, state, options);
    save_training_checkpoint(result.last_checkpoint, model, state, options);

    result.history.push_back(record);
    write_history(result.history_path, result.history);
    spdlog::info("epoch {}: loss {:.6f} lr {:.3g} CF1 {:.4f} OF1 {}", epoch, record.loss, record.lr,
                 record.metrics.cf1, record.metrics.of1 ? std::to_string(*record.metrics.of1) : "null");
    if (options.on_epoch) options.on_epoch(record);
  }
  result.best_metric = state.best_metric;
  return result;
}

}  // namespace maskct::train
