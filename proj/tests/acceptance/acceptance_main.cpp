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

// Acceptance runner: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.
// Pass "--only AC4" (repeatable) to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "gradcheck.hpp"
#include "maskct/augment/adaptive_mask.hpp"
#include "maskct/augment/photometric.hpp"
#include "maskct/data/dataset.hpp"
#include "maskct/data/image_io.hpp"
#include "maskct/encoder/classifier.hpp"
#include "maskct/encoder/encoder_layer.hpp"
#include "maskct/encoder/feature_discovery.hpp"
#include "maskct/encoder/sequence.hpp"
#include "maskct/labels/label_state.hpp"
#include "maskct/metrics/metrics.hpp"
#include "maskct/model/checkpoint.hpp"
#include "maskct/model/model.hpp"
#include "maskct/runtime/bench.hpp"
#include "maskct/runtime/commands.hpp"
#include "maskct/train/loss.hpp"
#include "maskct/train/trainer.hpp"

using namespace maskct;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and sizes, pinned.
constexpr double kGradTolerance = 1e-4;        // AC2
constexpr int kLeakageSeeds = 1000;            // AC3
constexpr int kOverfitImages = 32;             // AC4
constexpr int kOverfitSize = 64;
constexpr int kOverfitEpochs = 200;
constexpr double kOverfitOf1 = 0.99;
constexpr double kOverfitLossRatio = 10.0;
constexpr int kFuzzImages = 50;                // AC5
constexpr double kLn2Tolerance = 1e-9;         // AC6
constexpr double kBceGradTolerance = 1e-10;
constexpr int kBceFuzz = 10000;
constexpr int kDeterminismSteps = 5;           // AC7
constexpr int kShapeInput = 384;               // AC8
constexpr int kBenchFramesPerSubset = 100;     // AC9
constexpr double kFpsTolerance = 0.05;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// ---------------------------------------------------------------- AC1

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
  bool is(const metrics::Rational& r) const { return numerator(r) == num && denominator(r) == den; }
};

Frac hmean(Frac a, Frac b) { return a.num == 0 && b.num == 0 ? Frac{0, 1} : Frac{2, 1} * a * b / (a + b); }

// Literal double sums over samples and classes; OR divides matches by positives.
bool matches_oracle(int n, int k, unsigned tbits, unsigned pbits) {
  auto t = [&](int s, int c) { return static_cast<int>((tbits >> (s * k + c)) & 1u); };
  auto p = [&](int s, int c) { return static_cast<int>((pbits >> (s * k + c)) & 1u); };
  metrics::ConfusionCounts counts(static_cast<std::size_t>(k));
  for (int s = 0; s < n; ++s) {
    std::vector<std::uint8_t> ts(k), ps(k);
    for (int c = 0; c < k; ++c) {
      ts[c] = static_cast<std::uint8_t>(t(s, c));
      ps[c] = static_cast<std::uint8_t>(p(s, c));
    }
    counts.add(ts, ps);
  }
  const metrics::ExactMetrics m = metrics::aggregate_exact(counts);

  Frac cp{0, 1}, cr{0, 1};
  std::int64_t matches = 0, positives = 0;
  for (int c = 0; c < k; ++c) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (int s = 0; s < n; ++s) {
      tp += t(s, c) && p(s, c);
      fp += !t(s, c) && p(s, c);
      fn += t(s, c) && !p(s, c);
    }
    cp = cp + Frac::make(tp, tp + fp);
    cr = cr + Frac::make(tp, tp + fn);
  }
  cp = cp / Frac{k, 1};
  cr = cr / Frac{k, 1};
  for (int s = 0; s < n; ++s)
    for (int c = 0; c < k; ++c) {
      matches += t(s, c) == p(s, c);
      positives += t(s, c);
    }
  const Frac op = Frac::make(matches, static_cast<std::int64_t>(n) * k);
  bool ok = cp.is(m.cp) && cr.is(m.cr) && hmean(cp, cr).is(m.cf1) && op.is(m.op);
  if (positives == 0) return ok && !m.overall_recall && !m.of1;
  const Frac orr = Frac::make(matches, positives);
  return ok && m.overall_recall && orr.is(*m.overall_recall) && m.of1 && hmean(op, orr).is(*m.of1);
}

Outcome ac1() {
  std::size_t cases = 0, bad = 0;
  for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const unsigned cells = 1u << (n * k);
    for (unsigned t = 0; t < cells; ++t)
      for (unsigned p = 0; p < cells; ++p) {
        ++cases;
        bad += !matches_oracle(n, k, t, p);
      }
  }
  return {bad == 0, fmt("%zu truth/prediction combinations, %zu mismatches (exact rationals)", cases, bad)};
}

// ---------------------------------------------------------------- AC2

Outcome ac2() {
  const encoder::EncoderConfig cfg{8, 2, 4, 16, 0.1};
  ParameterSet ps;
  Rng rng(2024);
  labels::LabelTables tables = labels::LabelTables::create(ps, "labels", 1, 8, rng);
  encoder::FeatureDiscovery fd = encoder::FeatureDiscovery::create(ps, "fd", 3, rng);
  encoder::EncoderArray array(ps, "encoder", cfg, rng);
  encoder::ClassifierHead head = encoder::ClassifierHead::create(ps, "head", 8, 0.35, rng);
  for (ParamId id = 0; id < ps.size(); ++id)
    if (ps.at(id).trainable) ps[id] = normal_matrix(ps[id].rows(), ps[id].cols(), 0.4, rng);

  const Matrix feature = normal_matrix(1, 8, 1.0, rng);
  const labels::LabelStateVector lsv = labels::with_evidence(1, {{0, true}});
  const std::vector<std::uint8_t> target{1};

  // One feature token, the discovery token and one label token.
  struct Pass {
    encoder::FeatureDiscovery::Cache fd;
    encoder::EncoderArray::Cache enc;
    encoder::ClassifierHead::Cache head;
    encoder::SequenceLayout layout;
  };
  auto forward = [&](const ParameterSet& p, Pass* pass) {
    Rng dropout(77);
    const Matrix label_rows = tables.forward(p, lsv);
    const RowVector d = fd.forward(p, feature, label_rows, pass ? &pass->fd : nullptr);
    const encoder::EncoderSequence seq = encoder::assemble_sequence(feature, d, label_rows);
    const Matrix out = array.forward(p, seq.tokens, pass ? &pass->enc : nullptr, &dropout);
    if (pass) pass->layout = seq.layout;
    const Eigen::VectorXd logits =
        head.forward(p, out.middleRows(seq.layout.label_row(0), seq.layout.labels), pass ? &pass->head : nullptr, &dropout);
    return train::bce_loss(logits, target);
  };

  Pass pass;
  const train::LossResult loss = forward(ps, &pass);
  GradientSet grads(ps);
  const Matrix dlabels_out = head.backward(ps, pass.head, loss.grad, grads);
  Matrix dout = Matrix::Zero(pass.layout.rows(), 8);
  dout.middleRows(pass.layout.label_row(0), pass.layout.labels) = dlabels_out;
  const Matrix dseq = array.backward(ps, pass.enc, dout, grads);
  auto fd_in = fd.backward(ps, pass.fd, dseq.row(pass.layout.discovery_row()), grads);
  const Matrix dlabel_rows = dseq.middleRows(pass.layout.label_row(0), pass.layout.labels) + fd_in.labels;
  tables.backward(lsv, dlabel_rows, grads);

  const auto errors =
      maskct::testing::check_gradients(ps, grads, [&](const ParameterSet& p) { return forward(p, nullptr).value; });
  double worst = 0.0;
  std::string worst_name;
  for (const auto& e : errors)
    if (e.relative > worst) {
      worst = e.relative;
      worst_name = e.name;
    }
  return {worst <= kGradTolerance && !errors.empty(),
          fmt("%zu parameter groups, worst relative error %.3g (%s), tolerance %.0e", errors.size(), worst,
              worst_name.c_str(), kGradTolerance)};
}

// ---------------------------------------------------------------- AC3

model::ModelConfig small_model(int input) {
  model::ModelConfig c;
  c.wfe.backbone = backbone::BackboneConfig{18, 2, 4};
  c.wfe.input_size = input;
  c.encoder = encoder::EncoderConfig{16, 2, 2, 32, 0.1};
  c.num_labels = 5;
  return c;
}

Outcome ac3() {
  const model::MaskCtModel m(small_model(16), 3);
  std::size_t flips = 0, changed = 0;
  for (int seed = 0; seed < kLeakageSeeds; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    ImagePlane img(16, 16);
    std::uniform_int_distribution<int> px(0, 255);
    for (double& v : img.data()) v = px(rng);
    std::vector<std::uint8_t> truth(5);
    for (auto& t : truth) t = rng() & 1;
    const labels::LabelStateVector base = labels::sample_mask(truth, 0.4, rng);
    Rng d0(seed);
    const Eigen::VectorXd ref = m.forward(img, base, nullptr, &d0);
    for (std::size_t i = 0; i < 5; ++i) {
      if (base.state[i] != labels::LabelState::Masked) continue;
      labels::LabelStateVector flipped = base;
      flipped.truth[i] ^= 1;
      Rng d1(seed);
      ++flips;
      changed += (m.forward(img, flipped, nullptr, &d1) - ref).cwiseAbs().maxCoeff() != 0.0;
    }
  }
  return {changed == 0 && flips > 0,
          fmt("%d seeds, %zu masked-label flips, %zu changed any logit bit", kLeakageSeeds, flips, changed)};
}

// ---------------------------------------------------------------- AC4

Outcome ac4() {
  model::ModelConfig mc;
  mc.wfe.backbone = backbone::BackboneConfig{18, 2, 8};
  mc.wfe.input_size = kOverfitSize;
  mc.encoder = encoder::EncoderConfig{64, 4, 4, 256, 0.1};
  mc.classifier_dropout = 0.1;
  mc.num_labels = 5;
  model::MaskCtModel m(mc, 4);
  data::MemorySource source(data::make_cue_dataset(kOverfitImages, kOverfitSize, 5, 4));

  train::TrainConfig tc;
  tc.lr = 1e-3;
  tc.batch_size = kOverfitImages;
  tc.max_epochs = kOverfitEpochs;
  tc.seed = 4;
  tc.threads = 0;
  tc.plateau.patience = 1000;
  // Every label masked during training, matching the all-masked evaluation below.
  tc.mask_ratio = 1.0;
  train::LoopOptions opt;
  opt.output_dir = fs::temp_directory_path() / "maskct_acceptance" / "overfit";
  fs::remove_all(opt.output_dir);
  opt.vocabulary = labels::LabelVocabulary({"c0", "c1", "c2", "c3", "c4"});
  const auto t0 = Clock::now();
  const train::LoopResult result = train::train_loop(m, source, source, tc, opt);
  const double minutes = seconds_since(t0) / 60.0;

  const train::Evaluation ev = train::evaluate(m, source, 0.5);
  const metrics::ExactMetrics em = metrics::aggregate_exact(ev.counts);
  const double of1 = em.of1 ? em.of1->convert_to<double>() : 0.0;
  const double initial = result.history.front().loss;
  const double final_loss = result.history.back().loss;
  // OR divides matches by positives and can exceed 1, so OP is held to the same bar.
  const bool pass = of1 >= kOverfitOf1 && em.op >= metrics::Rational(99, 100) && final_loss < initial / kOverfitLossRatio;
  return {pass, fmt("train OF1 %.4f (OP %.4f, CF1 %.4f, micro-F1 %.4f), loss %.4f -> %.5f over %zu epochs, %.1f min",
                    of1, em.op.convert_to<double>(), em.cf1.convert_to<double>(), em.micro_f1.convert_to<double>(),
                    initial, final_loss, result.history.size(), minutes)};
}

// ---------------------------------------------------------------- AC5

Outcome ac5() {
  Rng rng(5);
  std::uniform_int_distribution<int> side(1, 48), px(0, 255);
  std::uniform_real_distribution<double> unit(0.0, 255.0);
  std::size_t contrast_bad = 0, light_bad = 0, mask_bad = 0;
  for (int i = 0; i < kFuzzImages; ++i) {
    ImagePlane img(side(rng), side(rng));
    for (double& v : img.data()) v = px(rng);
    contrast_bad += !(augment::adjust_contrast(img, 0.0, unit(rng)) == img);
    const augment::LightMap light = augment::compute_light(img);
    light_bad += augment::adjust_light(light, 0.0).values != light.values;

    const int box = 2 * std::uniform_int_distribution<int>(1, 12)(rng);
    ImagePlane flat(std::max(box, side(rng)), std::max(box, side(rng)), 255.0);
    const double value = px(rng);
    for (double& v : flat.data()) v = value;
    augment::MaskConfig mask;
    mask.box = box;
    const augment::MaskResult r = augment::adaptive_mask(flat, mask);
    mask_bad += !(r.image == flat) || !r.occluders.empty();
  }
  return {contrast_bad + light_bad + mask_bad == 0,
          fmt("%d images: contrast beta=0 mismatches %zu, light alpha=0 mismatches %zu, constant-image mask changes %zu",
              kFuzzImages, contrast_bad, light_bad, mask_bad)};
}

// ---------------------------------------------------------------- AC6

Outcome ac6() {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const std::vector<std::uint8_t> one{1};
  const double ln2_err = std::abs(train::bce_loss(zero, one).value - std::log(2.0));
  Rng rng(6);
  std::uniform_real_distribution<double> logit(-40.0, 40.0);
  double worst = 0.0;
  for (int i = 0; i < kBceFuzz; ++i) {
    Eigen::VectorXd x(1);
    x << logit(rng);
    const std::vector<std::uint8_t> y{static_cast<std::uint8_t>(rng() & 1)};
    const double expect = 1.0 / (1.0 + std::exp(-x(0))) - y[0];
    worst = std::max(worst, std::abs(train::bce_loss(x, y).grad(0) - expect));
  }
  return {ln2_err <= kLn2Tolerance && worst <= kBceGradTolerance,
          fmt("|L(0,1) - ln2| = %.2g (tol %.0e); max |dL/dx - (sigmoid(x) - y)| = %.2g over %d draws (tol %.0e)",
              ln2_err, kLn2Tolerance, worst, kBceFuzz, kBceGradTolerance)};
}

// ---------------------------------------------------------------- AC7

Outcome ac7() {
  data::MemorySource src(data::make_cue_dataset(8, 32, 5, 7));
  auto run = [&](unsigned threads) {
    model::MaskCtModel m(small_model(32), 7);
    train::TrainConfig cfg;
    cfg.lr = 1e-3;
    cfg.batch_size = 4;
    cfg.mask.box = 8;
    cfg.seed = 7;
    cfg.threads = threads;
    train::TrainState state = train::initial_state(m, cfg);
    std::vector<double> losses;
    for (int s = 0; s < kDeterminismSteps; ++s) {
      std::vector<std::size_t> batch;
      for (std::size_t i = 0; i < 4; ++i) batch.push_back((4 * static_cast<std::size_t>(s) + i) % 8);
      losses.push_back(train::train_step(m, state, src, batch, cfg).loss);
    }
    return std::pair{losses, m.parameters()};
  };
  const auto [la, pa] = run(1);
  const auto [lb, pb] = run(1);
  const auto [lc, pc] = run(3);
  bool same_params = true;
  for (ParamId id = 0; id < pa.size(); ++id) same_params = same_params && pa[id] == pb[id] && pa[id] == pc[id];
  const bool trajectory = la == lb && la == lc && same_params;

  const model::MaskCtModel m(small_model(32), 8);
  data::MemorySource frames(data::make_cue_dataset(40, 32, 5, 8));
  std::vector<runtime::BenchSubset> subsets{{"frames", &frames}};
  runtime::BenchOptions opt;
  opt.deterministic = true;
  opt.keep_predictions = true;
  std::vector<runtime::BenchResult> results;
  for (int b : {1, 7, 32}) {
    opt.batch_size = b;
    results.push_back(runtime::run_bench(m, subsets, {"a", "b", "c", "d", "e"}, opt));
  }
  bool bench_same = true;
  for (const auto& r : results) bench_same = bench_same && r.predictions == results.front().predictions;
  return {trajectory && bench_same,
          fmt("%d-step losses and parameters identical across reruns and 1/3 threads: %s; bench predictions identical "
              "for batch 1/7/32: %s",
              kDeterminismSteps, trajectory ? "yes" : "no", bench_same ? "yes" : "no")};
}

// ---------------------------------------------------------------- AC8

Outcome ac8() {
  std::vector<std::string> parts;
  bool pass = true;
  for (int depth : {18, 152}) {
    model::ModelConfig mc;
    mc.wfe.backbone = backbone::BackboneConfig{depth, 2, 64};
    mc.wfe.input_size = kShapeInput;
    mc.num_labels = 5;
    const model::MaskCtModel m(mc, 8);
    ImagePlane img(kShapeInput, kShapeInput);
    Rng rng(depth);
    std::uniform_int_distribution<int> px(0, 255);
    for (double& v : img.data()) v = px(rng);
    const auto t0 = Clock::now();
    const encoder::EncoderSequence seq = m.encode(img, labels::all_masked(5));
    const Eigen::VectorXd logits = m.forward(img, labels::all_masked(5));
    const int stride = mc.wfe.backbone.stride();
    const Eigen::Index expect = (kShapeInput / stride) * (kShapeInput / stride) + 1 + 5;
    const bool ok = seq.tokens.rows() == expect && seq.tokens.cols() == mc.encoder.d_model && logits.size() == 5 &&
                    logits.allFinite();
    pass = pass && ok;
    parts.push_back(fmt("resnet%d stride %d: %ld tokens (expected %ld), %.1f s", depth, stride,
                        static_cast<long>(seq.tokens.rows()), static_cast<long>(expect), seconds_since(t0)));
  }
  return {pass, parts[0] + "; " + parts[1]};
}

// ---------------------------------------------------------------- AC9

Outcome ac9() {
  const fs::path dir = fs::temp_directory_path() / "maskct_acceptance" / "bench";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::string> names{"sunny", "cloudy", "rainy", "snowy", "foggy"};
  labels::LabelVocabulary vocab(names);
  vocab.save(dir / "weather.txt");

  model::ModelConfig mc = small_model(64);
  mc.encoder = encoder::EncoderConfig{64, 4, 4, 256, 0.1};
  model::save_checkpoint(dir / "bench.ckpt", model::MaskCtModel(mc, 9), vocab, {{"config_hash", "acceptance"}});

  runtime::BenchArgs args;
  args.checkpoint = dir / "bench.ckpt";
  args.mode = "e2e";
  args.batch_size = 8;
  for (const char* subset : {"Real-Time-I", "Real-Time-II", "Real-Time-III"}) {
    data::DatasetManifest m;
    m.vocabulary = "weather.txt";
    m.labels = 5;
    const auto frames = data::make_cue_dataset(kBenchFramesPerSubset, 64, 5, std::hash<std::string>{}(subset));
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const std::string file = std::string(subset) + "_" + std::to_string(i) + ".png";
      data::write_png(dir / file, frames[i].image);
      m.records.push_back({file, frames[i].truth, data::Split::Test, subset, {}, static_cast<std::int64_t>(i)});
    }
    m.write(dir / (std::string(subset) + ".jsonl"));
    args.subsets.push_back(std::string(subset) + "=" + (dir / (std::string(subset) + ".jsonl")).string());
  }

  std::ostringstream out;
  const auto t0 = Clock::now();
  runtime::cmd_bench(args, out);
  const double stopwatch = seconds_since(t0);

  const auto doc = nlohmann::json::parse(out.str());
  const auto& r = doc["results"][0];
  const double total = r["total_frames"].get<double>();
  const double reported = r["overall_fps"].get<double>();
  const double oracle = total / stopwatch;
  const double rel = std::abs(reported - oracle) / oracle;
  const bool rows_ok = r["rows"].size() == 3 && r["average"]["subset"] == "Ave." &&
                       r["rows"][0]["subset"] == "Real-Time-I" && r["rows"][2]["subset"] == "Real-Time-III";
  std::string layout;
  for (const auto& row : r["rows"]) layout += row["subset"].get<std::string>() + " ";
  layout += r["average"]["subset"].get<std::string>();
  return {rows_ok && total == 3 * kBenchFramesPerSubset && rel <= kFpsTolerance,
          fmt("%.0f frames, reported %.2f FPS, stopwatch %.2f FPS, relative gap %.2f%% (tol %.0f%%); rows: %s", total,
              reported, oracle, 100.0 * rel, 100.0 * kFpsTolerance, layout.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  std::set<std::string> only;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--only") only.insert(argv[++i]);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
  const std::vector<std::string> titles = {
      "metric oracle equivalence", "encoder and classifier gradient check", "masked-label leakage",
      "tiny overfit",              "augmentation identities",               "BCE closed forms",
      "determinism",               "shape contract at 384",                 "benchmark protocol"};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [id, fn] = criteria[i];
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id.c_str(), titles[i].c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
