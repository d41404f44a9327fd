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

#include "maskct/runtime/bench.hpp"

#include <chrono>
#include <exception>
#include <thread>

#include "maskct/core/bounded_queue.hpp"
#include "maskct/core/error.hpp"
#include "maskct/core/parallel.hpp"
#include "maskct/encoder/classifier.hpp"
#include "maskct/labels/label_state.hpp"

namespace maskct::runtime {

const char* to_string(BenchMode m) { return m == BenchMode::Model ? "model" : "end_to_end"; }

namespace {

using Clock = std::chrono::steady_clock;

struct Frame {
  std::size_t index = 0;
  ImagePlane image;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

metrics::MetricsReport mean_report(const std::vector<BenchRow>& rows) {
  metrics::MetricsReport r;
  r.dataset = "Ave.";
  bool or_defined = true;
  double overall_recall = 0.0;
  double of1 = 0.0;
  for (const auto& row : rows) {
    const auto& m = row.metrics;
    r.threshold = m.threshold;
    r.classes = m.classes;
    r.samples += m.samples;
    r.cp += m.cp;
    r.cr += m.cr;
    r.cf1 += m.cf1;
    r.op += m.op;
    r.micro_precision += m.micro_precision;
    r.micro_recall += m.micro_recall;
    r.micro_f1 += m.micro_f1;
    if (m.overall_recall && m.of1) {
      overall_recall += *m.overall_recall;
      of1 += *m.of1;
    } else {
      or_defined = false;
    }
  }
  const double k = static_cast<double>(rows.size());
  r.cp /= k;
  r.cr /= k;
  r.cf1 /= k;
  r.op /= k;
  r.micro_precision /= k;
  r.micro_recall /= k;
  r.micro_f1 /= k;
  if (or_defined) {
    r.overall_recall = overall_recall / k;
    r.of1 = of1 / k;
  }
  return r;
}

}  // namespace

BenchResult run_bench(const model::MaskCtModel& model, const std::vector<BenchSubset>& subsets,
                      const std::vector<std::string>& class_names, const BenchOptions& options) {
  if (subsets.empty()) throw DataError("benchmark needs at least one frame subset");
  if (options.batch_size < 1) throw ConfigError("bench.batch_size: must be at least 1");
  const unsigned threads =
      options.deterministic ? 1u : (options.threads == 0 ? default_thread_count() : options.threads);
  const std::size_t labels = static_cast<std::size_t>(model.config().num_labels);
  const data::PrepareConfig prep{model.config().wfe.input_size, 0.0};
  const auto batch = static_cast<std::size_t>(options.batch_size);

  BenchResult result;
  result.mode = options.mode;
  result.batch_size = options.batch_size;
  for (const auto& subset : subsets) {
    const data::SampleSource& source = *subset.source;
    const std::size_t n = source.size();
    if (n == 0) throw DataError("frame stream '" + subset.name + "' is empty");
    if (source.num_labels() != labels)
      throw DataError("frame stream '" + subset.name + "' has " + std::to_string(source.num_labels()) +
                      " labels, model expects " + std::to_string(labels));

    std::vector<Eigen::VectorXd> probs(n);
    std::vector<std::vector<std::uint8_t>> truths(n);
    const auto states = labels::all_masked(labels);
    auto infer = [&](const std::vector<Frame>& frames) {
      parallel_for(frames.size(), threads, [&](std::size_t j) {
        probs[frames[j].index] = encoder::sigmoid(model.forward(frames[j].image, states));
      });
    };
    auto load = [&](std::size_t i) {
      data::Sample s = source.load(i);
      truths[i] = std::move(s.truth);
      return Frame{i, data::prepare_sample(s.image, data::PrepareMode::Eval, prep)};
    };

    double wall = 0.0;
    if (options.mode == BenchMode::Model) {
      std::vector<Frame> frames;
      frames.reserve(n);
      for (std::size_t i = 0; i < n; ++i) frames.push_back(load(i));
      const auto t0 = Clock::now();
      for (std::size_t b = 0; b < n; b += batch) {
        std::vector<Frame> chunk(std::make_move_iterator(frames.begin() + static_cast<std::ptrdiff_t>(b)),
                                 std::make_move_iterator(frames.begin() + static_cast<std::ptrdiff_t>(std::min(n, b + batch))));
        infer(chunk);
      }
      wall = seconds_since(t0);
    } else if (options.deterministic) {
      const auto t0 = Clock::now();
      for (std::size_t b = 0; b < n; b += batch) {
        std::vector<Frame> chunk;
        for (std::size_t i = b; i < std::min(n, b + batch); ++i) chunk.push_back(load(i));
        infer(chunk);
      }
      wall = seconds_since(t0);
    } else {
      BoundedQueue<Frame> queue(options.queue_capacity);
      std::exception_ptr producer_error;
      const auto t0 = Clock::now();
      {
        std::jthread producer([&] {
          try {
            for (std::size_t i = 0; i < n; ++i)
              if (!queue.push(load(i))) break;
          } catch (...) {
            producer_error = std::current_exception();
          }
          queue.close();
        });
        std::vector<Frame> chunk;
        try {
          while (auto frame = queue.pop()) {
            chunk.push_back(std::move(*frame));
            if (chunk.size() == batch) {
              infer(chunk);
              chunk.clear();
            }
          }
          if (!chunk.empty()) infer(chunk);
        } catch (...) {
          queue.close();
          throw;
        }
      }
      wall = seconds_since(t0);
      if (producer_error) std::rethrow_exception(producer_error);
    }

    metrics::ConfusionCounts counts(labels);
    for (std::size_t i = 0; i < n; ++i)
      counts.add(truths[i], metrics::binarize(std::span<const double>(probs[i].data(), probs[i].size()),
                                              options.threshold));
    BenchRow row;
    row.subset = subset.name;
    row.frames = n;
    row.wall_seconds = wall;
    row.fps = wall > 0.0 ? static_cast<double>(n) / wall : 0.0;
    row.metrics = metrics::aggregate(counts, class_names, options.threshold);
    row.metrics.dataset = subset.name;
    result.rows.push_back(std::move(row));
    if (options.keep_predictions) result.predictions.push_back(std::move(probs));
    result.total_frames += n;
    result.total_wall_seconds += wall;
  }

  result.average.subset = "Ave.";
  result.average.frames = result.total_frames;
  result.average.wall_seconds = result.total_wall_seconds;
  for (const auto& row : result.rows) result.average.fps += row.fps;
  result.average.fps /= static_cast<double>(result.rows.size());
  result.average.metrics = mean_report(result.rows);
  result.overall_fps =
      result.total_wall_seconds > 0.0 ? static_cast<double>(result.total_frames) / result.total_wall_seconds : 0.0;
  return result;
}

namespace {

nlohmann::ordered_json row_json(const BenchRow& row) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  const auto& m = row.metrics;
  return {{"subset", row.subset},
          {"frames", row.frames},
          {"wall_seconds", row.wall_seconds},
          {"fps", row.fps},
          {"CP", m.cp},
          {"CR", m.cr},
          {"CF1", m.cf1},
          {"OP", m.op},
          {"OR", opt(m.overall_recall)},
          {"OF1", opt(m.of1)}};
}

}  // namespace

nlohmann::ordered_json bench_to_json(const BenchResult& result) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) rows.push_back(row_json(row));
  return {{"mode", to_string(result.mode)},
          {"batch_size", result.batch_size},
          {"config_hash", result.config_hash},
          {"rows", rows},
          {"average", row_json(result.average)},
          {"total_frames", result.total_frames},
          {"total_wall_seconds", result.total_wall_seconds},
          {"overall_fps", result.overall_fps}};
}

}  // namespace maskct::runtime
