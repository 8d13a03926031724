// mixing.cpp

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

#include "anchored/mixsim/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "anchored/mixsim/features_io.hpp"
#include "anchored/util/seed.hpp"

namespace anchored {

using nlohmann::json;

Index ShiftOffset(Index main_len, double shift_pct) {
  if (shift_pct < 0) throw std::invalid_argument("negative shift");
  return static_cast<Index>(std::floor(shift_pct * double(main_len) / 100.0 + 0.5));
}

FeatureMatrix CropOrTile(const FeatureMatrix& background, Index target_len,
                         std::uint64_t seed) {
  const Index n = background.rows();
  if (n < 1) throw std::invalid_argument("crop_or_tile: empty background");
  if (target_len < 0) throw std::invalid_argument("crop_or_tile: negative length");
  if (n >= target_len) {
    std::mt19937_64 rng(seed);
    const Index start = std::uniform_int_distribution<Index>(0, n - target_len)(rng);
    return background.middleRows(start, target_len);
  }
  FeatureMatrix out(target_len, background.cols());
  for (Index r = 0; r < target_len; ++r) out.row(r) = background.row(r % n);
  return out;
}

double Energy(const FeatureMatrix& m, Index begin, Index end) {
  if (end <= begin) throw std::invalid_argument("energy over an empty region");
  return m.middleRows(begin, end - begin).squaredNorm() /
         double((end - begin) * m.cols());
}

double SnrGain(double e_main, double e_bg, double snr_db) {
  if (!(e_main > 0) || !(e_bg > 0))
    throw std::invalid_argument("scale_to_snr: zero-energy signal");
  return std::sqrt(e_main / (e_bg * std::pow(10.0, snr_db / 10.0)));
}

Mixture MixFeatures(const Utterance& main, const FeatureMatrix& background,
                    double snr_db, double shift_pct) {
  const Index L = main.features.rows();
  if (background.rows() != L || background.cols() != main.features.cols())
    throw ShapeError("mix: background must match the main utterance shape");
  Mixture mx;
  mx.placement = {L, ShiftOffset(L, shift_pct)};
  const Placement& p = mx.placement;
  double e_main, e_bg;
  if (p.has_overlap()) {
    e_main = Energy(main.features, p.overlap_begin(), p.overlap_end());
    e_bg = Energy(background, 0, p.overlap_end() - p.offset);
  } else {
    e_main = Energy(main.features, 0, L);
    e_bg = Energy(background, 0, L);
  }
  mx.gain = SnrGain(e_main, e_bg, snr_db);
  mx.background = background;
  FeatureMatrix out = FeatureMatrix::Zero(p.total_len(), main.features.cols());
  out.topRows(L) = main.features;
  out.middleRows(p.offset, L) += mx.gain * background;
  mx.seq.id = main.id;
  mx.seq.frames = RoundToFloat(out);
  mx.seq.transcript = main.tokens;
  mx.seq.anchor_len_frames = main.anchor_len;
  mx.seq.frame_labels.assign(static_cast<size_t>(p.total_len()), 0);
  std::copy(main.frame_labels.begin(), main.frame_labels.end(),
            mx.seq.frame_labels.begin());
  return mx;
}

Mixture Mix(const MixtureSpec& spec, const Corpus& corpus) {
  const Utterance& main = corpus.Get(spec.main_id);
  const Utterance& bg = corpus.Get(spec.background_id);
  Mixture m = MixFeatures(main, CropOrTile(bg.features, main.features.rows(), spec.seed),
                          spec.snr_db, spec.shift_pct);
  m.seq.id = spec.main_id + "+" + spec.background_id;
  return m;
}

double MeasureSnr(const FeatureMatrix& mixture, const FeatureMatrix& main,
                  const Placement& p) {
  if (!p.has_overlap()) return std::numeric_limits<double>::infinity();
  const Index b = p.overlap_begin(), e = p.overlap_end();
  FeatureMatrix bg = mixture.middleRows(b, e - b) - main.middleRows(b, e - b);
  return 10.0 * std::log10(Energy(main, b, e) / Energy(bg, 0, e - b));
}

std::string CellName(double snr_db, double shift_pct) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snr%02d_shift%03d", int(std::lround(snr_db)),
                int(std::lround(shift_pct)));
  return buf;
}

std::vector<MixtureManifest> BuildEvalGrid(const Corpus& corpus, Split split,
                                           Index size, std::uint64_t seed) {
  const std::vector<size_t> pool = corpus.Indices(split);
  if (pool.empty()) throw std::invalid_argument("eval grid: split has no utterances");
  // Main utterances in a seeded order, cycling when size exceeds the split.
  std::vector<size_t> order = pool;
  std::mt19937_64 shuffle(DeriveSeed({seed, 3}));
  std::shuffle(order.begin(), order.end(), shuffle);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (Index i = 0; i < size; ++i) {
    const Utterance& main = corpus.utterances[order[size_t(i) % order.size()]];
    std::mt19937_64 rng(DeriveSeed({seed, 4, std::uint64_t(i)}));
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    const Utterance* bg;
    int tries = 0;
    do {
      bg = &corpus.utterances[pool[pick(rng)]];
      if (++tries > 10000)
        throw std::runtime_error("eval grid: no background of a different style");
    } while (bg->style == main.style);
    pairs.emplace_back(main.id, bg->id);
  }
  std::vector<MixtureManifest> grid;
  for (double shift : kEvalShiftsPct) {
    for (double snr : kEvalSnrsDb) {
      MixtureManifest m;
      m.name = CellName(snr, shift);
      m.split = split;
      m.snr_db = snr;
      m.shift_pct = shift;
      for (Index i = 0; i < size; ++i) {
        ManifestEntry e;
        e.spec = {pairs[i].first, pairs[i].second, snr, shift,
                  DeriveSeed({seed, 5, std::uint64_t(i)})};
        const Utterance& main = corpus.Get(e.spec.main_id);
        e.transcript = main.tokens;
        e.anchor_len = main.anchor_len;
        e.main_len = main.features.rows();
        e.offset = ShiftOffset(e.main_len, shift);
        char buf[32];
        std::snprintf(buf, sizeof buf, "feats/%05lld.feat", static_cast<long long>(i));
        e.features = buf;
        m.entries.push_back(std::move(e));
      }
      grid.push_back(std::move(m));
    }
  }
  return grid;
}

namespace {

json EntryToJson(const ManifestEntry& e) {
  return {{"main_id", e.spec.main_id},
          {"background_id", e.spec.background_id},
          {"snr_db", e.spec.snr_db},
          {"shift_pct", e.spec.shift_pct},
          {"seed", e.spec.seed},
          {"transcript", e.transcript.tokens()},
          {"anchor_len", e.anchor_len},
          {"main_len", e.main_len},
          {"offset", e.offset},
          {"gain", e.gain},
          {"features", e.features}};
}

ManifestEntry EntryFromJson(const json& j) {
  ManifestEntry e;
  e.spec.main_id = j.at("main_id");
  e.spec.background_id = j.at("background_id");
  e.spec.snr_db = j.at("snr_db");
  e.spec.shift_pct = j.at("shift_pct");
  e.spec.seed = j.at("seed");
  e.transcript = TokenSequence(j.at("transcript").get<std::vector<int>>());
  e.anchor_len = j.at("anchor_len");
  e.main_len = j.at("main_len");
  e.offset = j.at("offset");
  e.gain = j.at("gain");
  e.features = j.at("features");
  return e;
}

}  // namespace

void WriteGrid(std::vector<MixtureManifest>& grid, const Corpus& corpus,
               const std::filesystem::path& dir) {
  json index = json::array();
  for (auto& m : grid) {
    const auto cell_dir = dir / m.name;
    json entries = json::array();
    for (auto& e : m.entries) {
      Mixture mx = Mix(e.spec, corpus);
      e.gain = mx.gain;
      e.offset = mx.placement.offset;
      WriteFeatures(cell_dir / e.features, mx.seq.frames);
      entries.push_back(EntryToJson(e));
    }
    json j = {{"format", "anchored-mixture-manifest"},
              {"version", 1},
              {"name", m.name},
              {"split", ToString(m.split)},
              {"snr_db", m.snr_db},
              {"shift_pct", m.shift_pct},
              {"entries", entries}};
    std::ofstream os(cell_dir / "manifest.json", std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write manifest in " + cell_dir.string());
    os << j.dump(1) << "\n";
    index.push_back(m.name);
  }
  std::ofstream os(dir / "grid.json", std::ios::trunc);
  os << json{{"cells", index}}.dump(1) << "\n";
}

MixtureManifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("missing manifest " + path.string());
  json j = json::parse(is);
  MixtureManifest m;
  m.name = j.at("name");
  m.split = ParseSplit(j.at("split"));
  m.snr_db = j.at("snr_db");
  m.shift_pct = j.at("shift_pct");
  for (const auto& je : j.at("entries")) m.entries.push_back(EntryFromJson(je));
  return m;
}

std::vector<MixtureManifest> LoadGrid(const std::filesystem::path& dir) {
  std::ifstream is(dir / "grid.json");
  if (!is) throw std::runtime_error("missing mixture grid " + (dir / "grid.json").string());
  json j = json::parse(is);
  std::vector<MixtureManifest> grid;
  for (const auto& name : j.at("cells"))
    grid.push_back(LoadManifest(dir / name.get<std::string>() / "manifest.json"));
  return grid;
}

std::vector<LoadedMixture> LoadMixtures(const MixtureManifest& m,
                                        const std::filesystem::path& dir) {
  std::vector<LoadedMixture> out;
  for (const auto& e : m.entries) {
    LoadedMixture lm;
    lm.entry = e;
    lm.seq.id = e.spec.main_id + "+" + e.spec.background_id;
    lm.seq.frames = ReadFeatures(dir / m.name / e.features);
    lm.seq.transcript = e.transcript;
    lm.seq.anchor_len_frames = e.anchor_len;
    out.push_back(std::move(lm));
  }
  return out;
}

AugmentedUtterance AugmentTrainingUtterance(const Corpus& corpus,
                                            const std::vector<size_t>& pool,
                                            size_t utterance, const TrainingMixerConfig& cfg,
                                            std::uint64_t seed, std::uint64_t epoch) {
  const Utterance& main = corpus.utterances.at(utterance);
  std::mt19937_64 rng(DeriveSeed({seed, epoch, utterance}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AugmentedUtterance out;
  out.mixed = unit(rng) < cfg.p_mix;
  const bool clean_anchor = unit(rng) < cfg.p_clean_anchor;
  out.shift_pct = cfg.shift_min_pct + (cfg.shift_max_pct - cfg.shift_min_pct) * unit(rng);
  const std::uint64_t crop_seed = rng();
  std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
  if (out.mixed) {
    const Utterance* bg;
    int tries = 0;
    do {
      bg = &corpus.utterances[pool[pick(rng)]];
      if (++tries > 10000)
        throw std::runtime_error("training mixer: no background of a different style");
    } while (bg->style == main.style);
    out.background_id = bg->id;
    out.seq = MixFeatures(main, CropOrTile(bg->features, main.features.rows(), crop_seed),
                          cfg.snr_db, out.shift_pct).seq;
  } else {
    out.seq = ToFeatureSequence(main);
  }
  out.anchor.anchor_len_raw_frames = main.anchor_len;
  if (clean_anchor) {
    out.anchor.source = AnchorSource::kClean;
    out.anchor.clean_anchor_features = main.features.topRows(main.anchor_len);
  } else {
    out.anchor.source = AnchorSource::kMixed;
  }
  return out;
}

}  // namespace anchored
