// pipeline/pipeline.hpp

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

// The stages of an experiment. Each reads its inputs from and writes its
// artifacts to the directories named by the ExperimentConfig.

#ifndef ANCHORED_PIPELINE_PIPELINE_HPP_
#define ANCHORED_PIPELINE_PIPELINE_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anchored/evalreport/report.hpp"
#include "anchored/pipeline/experiment_config.hpp"
#include "anchored/pipeline/trainer.hpp"

namespace anchored {

/// An input artifact that an earlier stage should have produced.
class MissingArtifactError : public std::runtime_error {
 public:
  explicit MissingArtifactError(const std::filesystem::path& path,
                                const std::string& producer)
      : std::runtime_error("missing artifact " + path.string() + " (run `" +
                           producer + "` first)") {}
};

/// Corpus directory: corpus.json and feats/.
std::filesystem::path RunSynth(const ExperimentConfig& cfg);

/// The 15-cell evaluation grid built from the corpus.
std::filesystem::path RunMix(const ExperimentConfig& cfg);

TrainSummary RunTrain(const ExperimentConfig& cfg, bool resume, std::ostream* log);

/// Decodes every cell of the grid and writes decode/<cell>.json. Uses
/// train/best.ckpt unless `checkpoint` is given.
std::filesystem::path RunDecode(const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& checkpoint);

/// Scores the decoded grid into report/report.json and report/report.txt,
/// with WERR against `reference` (another report.json) when given.
ConditionReport RunScore(const ExperimentConfig& cfg,
                         const std::optional<std::filesystem::path>& reference);

/// Histograms the gate values of eval.gate_cell (or `cell`) into
/// gates/<cell>.csv and gates/<cell>.json.
GateHistogram RunAnalyzeGates(const ExperimentConfig& cfg,
                              const std::optional<std::string>& cell);

/// Reads a report written by RunScore.
ConditionReport LoadReport(const std::filesystem::path& report_json);

}  // namespace anchored

#endif  // ANCHORED_PIPELINE_PIPELINE_HPP_
