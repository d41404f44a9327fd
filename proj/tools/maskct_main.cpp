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

#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "maskct/runtime/commands.hpp"

using namespace maskct::runtime;

int main(int argc, char** argv) {
  CLI::App app{"maskct: multi-label weather recognition with masked label states"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a config file");
  train_cmd->add_option("-c,--config", train.config, "Config file")->required();
  train_cmd->add_option("--set", train.overrides, "Override a setting: section.key=value");
  train_cmd->add_option("--max-epochs", train.max_epochs, "Override train.max_epochs");
  train_cmd->add_option("-o,--output", train.output_dir, "Override run.output_dir");
  train_cmd->add_flag("--resume", train.resume, "Continue from last.ckpt in the output directory");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a manifest");
  eval_cmd->add_option("--checkpoint", eval.checkpoint)->required();
  eval_cmd->add_option("--manifest", eval.manifest)->required();
  eval_cmd->add_option("--threshold", eval.threshold)->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--split", eval.split, "Only records with this split tag");
  eval_cmd->add_option("-o,--output", eval.output, "Also write the report here");
  eval_cmd->add_option("--threads", eval.threads);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict labels for images");
  predict_cmd->add_option("--checkpoint", predict.checkpoint)->required();
  predict_cmd->add_option("images", predict.images)->required();
  predict_cmd->add_option("--evidence", predict.evidence, "Pin a known label: name=0|1");
  predict_cmd->add_option("--threshold", predict.threshold)->check(CLI::Range(0.0, 1.0));
  predict_cmd->add_option("-o,--output", predict.output);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Frame-streaming throughput benchmark");
  bench_cmd->add_option("--checkpoint", bench.checkpoint)->required();
  bench_cmd->add_option("--subset", bench.subsets, "name=manifest.jsonl, in stream order")->required();
  bench_cmd->add_option("--mode", bench.mode, "model, e2e or both");
  bench_cmd->add_option("--batch", bench.batch_size);
  bench_cmd->add_flag("--deterministic", bench.deterministic, "Serialize decode and inference");
  bench_cmd->add_option("--queue", bench.queue_capacity, "Prefetch queue capacity");
  bench_cmd->add_option("--threshold", bench.threshold)->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--threads", bench.threads);
  bench_cmd->add_option("-o,--output", bench.output);

  AugmentPreviewArgs preview;
  auto* preview_cmd = app.add_subcommand("augment-preview", "Write every augmented fragment with a JSON sidecar");
  preview_cmd->add_option("--image", preview.image)->required();
  preview_cmd->add_option("-o,--output", preview.output_dir)->required();
  preview_cmd->add_option("--seed", preview.seed);
  preview_cmd->add_option("--fragments", preview.fragments);
  preview_cmd->add_option("--box", preview.box);
  preview_cmd->add_option("--beta-range", preview.beta_range);
  preview_cmd->add_option("--alpha-range", preview.alpha_range);

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Partition a manifest into train/val/test");
  split_cmd->add_option("--manifest", split.manifest)->required();
  split_cmd->add_option("-o,--output", split.output_dir)->required();
  split_cmd->add_option("--seed", split.seed);
  split_cmd->add_option("--ratios", split.ratios)->expected(3)->delimiter(',');
  split_cmd->add_flag("--binarize", split.binarize, "Rebuild bits from raw intensities (>= 0.5)");

  IngestVideoArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest-video", "Extract annotated frames from a clip into a manifest");
  ingest_cmd->add_option("--spec", ingest.spec)->required();
  ingest_cmd->add_option("-o,--output", ingest.output)->required();
  ingest_cmd->add_option("--frames-dir", ingest.frames_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("maskct"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  return run_guarded(
      [&] {
        if (*train_cmd) return cmd_train(train, std::cout);
        if (*eval_cmd) return cmd_eval(eval, std::cout);
        if (*predict_cmd) return cmd_predict(predict, std::cout);
        if (*bench_cmd) return cmd_bench(bench, std::cout);
        if (*preview_cmd) return cmd_augment_preview(preview, std::cout);
        if (*split_cmd) return cmd_split(split, std::cout);
        return cmd_ingest_video(ingest, std::cout);
      },
      std::cerr);
}
