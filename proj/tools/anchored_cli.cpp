// anchored_cli.cpp

// Copyright 2026  The anchored-transducer authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line driver for the experiment pipeline.
//
//   anchored_cli <command> --config exp.json [options]
//
// Exit status: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "anchored/pipeline/pipeline.hpp"

namespace {

using anchored::ExperimentConfig;

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchored transducer experiments: synth, mix, train, decode, score, analyze-gates"};
  app.require_subcommand(1);
  std::string config_path;
  std::string checkpoint, reference, cell;
  bool resume = false;

  auto with_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    return sub;
  };
  auto* synth = with_config(app.add_subcommand("synth", "synthesize the toy corpus"));
  auto* mix = with_config(app.add_subcommand("mix", "build the 15-cell evaluation grid"));
  auto* train = with_config(app.add_subcommand("train", "train the configured model"));
  train->add_flag("--resume", resume, "continue from train/last.ckpt");
  auto* decode = with_config(app.add_subcommand("decode", "decode every grid cell"));
  decode->add_option("--checkpoint", checkpoint, "checkpoint (default train/best.ckpt)");
  auto* score = with_config(app.add_subcommand("score", "score decoded cells into a report"));
  score->add_option("--reference", reference, "report.json of the WERR reference system");
  auto* gates = with_config(app.add_subcommand("analyze-gates", "histogram joiner gate values"));
  gates->add_option("--cell", cell, "grid cell (default eval.gate_cell)");
  auto* run = with_config(app.add_subcommand("run", "synth, mix, train, decode and score"));
  run->add_option("--reference", reference, "report.json of the WERR reference system");
  auto* print = app.add_subcommand("print-config", "print the default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  if (print->parsed()) {
    std::cout << anchored::ToJson(ExperimentConfig{}).dump(2) << "\n";
    return 0;
  }

  ExperimentConfig cfg;
  try {
    cfg = anchored::LoadExperimentConfig(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }

  auto opt_path = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
  };
  try {
    if (synth->parsed() || run->parsed())
      std::cout << "corpus: " << anchored::RunSynth(cfg).string() << "\n";
    if (mix->parsed() || run->parsed())
      std::cout << "grid: " << anchored::RunMix(cfg).string() << "\n";
    if (train->parsed() || run->parsed()) {
      const auto s = anchored::RunTrain(cfg, resume, &std::cout);
      std::cout << "trained " << s.epochs_completed << " epochs, " << s.steps
                << " steps, best dev loss " << s.best_dev_loss << " at epoch "
                << s.best_epoch + 1 << "\n";
    }
    if (decode->parsed() || run->parsed())
      std::cout << "hypotheses: " << anchored::RunDecode(cfg, opt_path(checkpoint)).string()
                << "\n";
    if (score->parsed() || run->parsed()) {
      anchored::RunScore(cfg, opt_path(reference));
      std::ifstream txt(cfg.ReportDir() / "report.txt");
      std::cout << txt.rdbuf();
    }
    if (gates->parsed()) {
      const auto h = anchored::RunAnalyzeGates(
          cfg, cell.empty() ? std::nullopt : std::optional<std::string>(cell));
      std::cout << "gate mean: target " << h.mean_target() << " (" << h.n_target
                << " frames), background " << h.mean_background() << " ("
                << h.n_background << " frames)\n";
    }
  } catch (const anchored::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
