// pipeline/experiment_config.hpp

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

#ifndef ANCHORED_PIPELINE_EXPERIMENT_CONFIG_HPP_
#define ANCHORED_PIPELINE_EXPERIMENT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "anchored/aux_objectives/objectives.hpp"
#include "anchored/mixsim/corpus.hpp"
#include "anchored/mixsim/mixing.hpp"
#include "anchored/transducer/config.hpp"

namespace anchored {

/// Adam with linear warm-up and global gradient-norm clipping.
struct OptimizerConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Index warmup_steps = 500;
  int epochs = 30;
  Index batch_size = 16;
  double grad_clip = 5.0;
  /// Dev utterances used for the per-epoch dev loss; 0 means all.
  Index dev_utterances = 0;

  void Validate() const;
};

struct SeedConfig {
  std::uint64_t corpus = 1;
  std::uint64_t model = 7;
  std::uint64_t train = 11;  // shuffling and augmentation
  std::uint64_t eval = 13;   // test-grid pairs and crops
};

struct EvalConfig {
  Split split = Split::kTest;
  Index utterances_per_cell = 500;
  /// Cell whose gates `analyze-gates` histograms.
  std::string gate_cell = "snr01_shift100";
};

struct ExperimentConfig {
  std::string name = "anchored";
  /// Artifacts of this run. ANCHORED_OUTPUT_ROOT, when set, replaces it.
  std::string output_dir = "runs/anchored";
  /// Shared corpus and grid directories; empty means under output_dir.
  std::string corpus_dir;
  std::string grid_dir;

  ModelConfig model;
  ObjectiveMode objective = ObjectiveMode::kNone;
  LossWeights loss_weights;
  OptimizerConfig optimizer;
  ToyCorpusConfig corpus;  // corpus.seed is taken from seeds.corpus
  TrainingMixerConfig mixer;
  EvalConfig eval;
  SeedConfig seeds;

  void Validate() const;

  std::filesystem::path OutputDir() const;
  std::filesystem::path CorpusDir() const;
  std::filesystem::path GridDir() const;
  std::filesystem::path TrainDir() const { return OutputDir() / "train"; }
  std::filesystem::path DecodeDir() const { return OutputDir() / "decode"; }
  std::filesystem::path ReportDir() const { return OutputDir() / "report"; }
  std::filesystem::path GatesDir() const { return OutputDir() / "gates"; }
};

/// Thrown for malformed configuration content.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

nlohmann::json ToJson(const ModelConfig& c);
ModelConfig ModelConfigFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
void SaveExperimentConfig(const ExperimentConfig& c, const std::filesystem::path& path);

}  // namespace anchored

#endif  // ANCHORED_PIPELINE_EXPERIMENT_CONFIG_HPP_
