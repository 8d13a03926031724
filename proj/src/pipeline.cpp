// pipeline.cpp

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

#include "anchored/pipeline/pipeline.hpp"

#include <fstream>

#include "anchored/pipeline/checkpoint.hpp"

namespace anchored {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void Require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) throw MissingArtifactError(path, producer);
}

json ReadJson(const fs::path& path, const std::string& producer) {
  Require(path, producer);
  std::ifstream in(path);
  return json::parse(in);
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

Corpus LoadCorpusFor(const ExperimentConfig& cfg) {
  Require(cfg.CorpusDir() / "corpus.json", "synth");
  return LoadCorpus(cfg.CorpusDir());
}

std::vector<MixtureManifest> LoadGridFor(const ExperimentConfig& cfg) {
  Require(cfg.GridDir() / "grid.json", "mix");
  return LoadGrid(cfg.GridDir());
}

template <typename Scalar>
json DecodeCell(AnchoredModel<Scalar>& model, const MixtureManifest& m,
                const fs::path& grid_dir) {
  json utts = json::array();
  for (const LoadedMixture& lm : LoadMixtures(m, grid_dir)) {
    json u = {{"main_id", lm.entry.spec.main_id},
              {"background_id", lm.entry.spec.background_id},
              {"main_len", lm.entry.main_len},
              {"ref", lm.seq.transcript.tokens()}};
    try {
      auto hyp = model.Decode(lm.seq, AnchorSpec::Mixed(lm.seq));
      u["hyp"] = hyp.tokens.tokens();
      if (!hyp.gate.empty()) u["gate"] = hyp.gate;
    } catch (const std::exception& e) {
      u["error"] = e.what();
    }
    utts.push_back(std::move(u));
  }
  return {{"cell", m.name}, {"snr_db", m.snr_db}, {"shift_pct", m.shift_pct},
          {"utterances", std::move(utts)}};
}

template <typename Scalar>
void DecodeGrid(const Checkpoint& ckpt, const std::vector<MixtureManifest>& grid,
                const ExperimentConfig& cfg) {
  AnchoredModel<Scalar> model = ModelFromCheckpoint<Scalar>(ckpt);
  for (const MixtureManifest& m : grid) {
    json j = DecodeCell(model, m, cfg.GridDir());
    j["system"] = cfg.name;
    WriteText(cfg.DecodeDir() / (m.name + ".json"), j.dump(1) + "\n");
  }
}

}  // namespace

fs::path RunSynth(const ExperimentConfig& cfg) {
  const Corpus corpus = SynthCorpus(cfg.corpus);
  SaveCorpus(corpus, cfg.CorpusDir());
  return cfg.CorpusDir();
}

fs::path RunMix(const ExperimentConfig& cfg) {
  const Corpus corpus = LoadCorpusFor(cfg);
  std::vector<MixtureManifest> grid =
      BuildEvalGrid(corpus, cfg.eval.split, cfg.eval.utterances_per_cell, cfg.seeds.eval);
  WriteGrid(grid, corpus, cfg.GridDir());
  return cfg.GridDir();
}

TrainSummary RunTrain(const ExperimentConfig& cfg, bool resume, std::ostream* log) {
  const Corpus corpus = LoadCorpusFor(cfg);
  SaveExperimentConfig(cfg, cfg.TrainDir() / "config.json");
  return Train(cfg, corpus, cfg.TrainDir(), resume, log);
}

fs::path RunDecode(const ExperimentConfig& cfg, const std::optional<fs::path>& checkpoint) {
  const fs::path path = checkpoint.value_or(cfg.TrainDir() / "best.ckpt");
  Require(path, "train");
  const Checkpoint ckpt = LoadCheckpoint(path);
  const auto grid = LoadGridFor(cfg);
  if (ckpt.config.precision == 64)
    DecodeGrid<double>(ckpt, grid, cfg);
  else
    DecodeGrid<float>(ckpt, grid, cfg);
  return cfg.DecodeDir();
}

ConditionReport RunScore(const ExperimentConfig& cfg, const std::optional<fs::path>& reference) {
  const auto grid = LoadGridFor(cfg);
  ConditionReport report;
  report.system = cfg.name;
  for (const MixtureManifest& m : grid) {
    const json j = ReadJson(cfg.DecodeDir() / (m.name + ".json"), "decode");
    CellReport cell;
    cell.name = m.name;
    cell.snr_db = m.snr_db;
    cell.shift_pct = m.shift_pct;
    for (const json& u : j.at("utterances")) {
      if (u.contains("error")) {
        ++cell.failed;
        continue;
      }
      cell.Add(TokenSequence(u.at("ref").get<std::vector<int>>()),
               TokenSequence(u.at("hyp").get<std::vector<int>>()));
    }
    report.cells.push_back(cell);
  }
  std::optional<ConditionReport> ref;
  if (reference) ref = LoadReport(*reference);
  const ConditionReport* ref_ptr = ref ? &*ref : nullptr;
  WriteText(cfg.ReportDir() / "report.json", ToJson(report, ref_ptr).dump(2) + "\n");
  std::vector<ConditionReport> rows;
  if (ref) rows.push_back(*ref);
  rows.push_back(report);
  WriteText(cfg.ReportDir() / "report.txt", FormatTable(rows, ref_ptr));
  return report;
}

GateHistogram RunAnalyzeGates(const ExperimentConfig& cfg, const std::optional<std::string>& cell) {
  const std::string name = cell.value_or(cfg.eval.gate_cell);
  const json j = ReadJson(cfg.DecodeDir() / (name + ".json"), "decode");
  GateHistogram h;
  Index with_gate = 0;
  for (const json& u : j.at("utterances")) {
    if (!u.contains("gate")) continue;
    ++with_gate;
    h.Add(u.at("gate").get<std::vector<double>>(), u.at("main_len").get<Index>(),
          cfg.model.stack_factor);
  }
  if (with_gate == 0)
    throw std::runtime_error("cell " + name + " has no gate values; the model was decoded without gating");
  WriteText(cfg.GatesDir() / (name + ".csv"), h.ToCsv());
  const json summary = {{"cell", name},
                        {"target_frames", h.n_target},
                        {"background_frames", h.n_background},
                        {"mean_target", h.mean_target()},
                        {"mean_background", h.mean_background()},
                        {"min", h.min_value},
                        {"max", h.max_value}};
  WriteText(cfg.GatesDir() / (name + ".json"), summary.dump(2) + "\n");
  return h;
}

ConditionReport LoadReport(const fs::path& report_json) {
  return ReportFromJson(ReadJson(report_json, "score"));
}

}  // namespace anchored
