// mixsim/mixing.hpp

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

// Two-speaker mixtures in feature space: a main utterance plus a background
// utterance scaled to a target SNR and delayed by a percentage of the main
// utterance length.

#ifndef ANCHORED_MIXSIM_MIXING_HPP_
#define ANCHORED_MIXSIM_MIXING_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anchored/anchoring/anchor_spec.hpp"
#include "anchored/mixsim/corpus.hpp"

namespace anchored {

inline const std::vector<double> kEvalSnrsDb{1, 5, 10, 20, 50};
inline const std::vector<double> kEvalShiftsPct{0, 50, 100};

struct MixtureSpec {
  std::string main_id;
  std::string background_id;
  double snr_db = 10;
  double shift_pct = 0;
  std::uint64_t seed = 0;  // selects the background crop
};

/// Main speech occupies [0, main_len); background [offset, offset + main_len).
struct Placement {
  Index main_len = 0;
  Index offset = 0;

  Index total_len() const { return offset + main_len; }
  Index overlap_begin() const { return offset; }
  Index overlap_end() const { return std::max(offset, main_len); }
  bool has_overlap() const { return offset < main_len; }
};

/// round-half-up(shift_pct * L / 100).
Index ShiftOffset(Index main_len, double shift_pct);

/// Crops a seeded contiguous span from a longer background, or repeats a
/// shorter one end to end and keeps the first `target_len` frames.
FeatureMatrix CropOrTile(const FeatureMatrix& background, Index target_len,
                         std::uint64_t seed);

/// Mean squared value of the rows [begin, end).
double Energy(const FeatureMatrix& m, Index begin, Index end);

/// Gain g with E_main / (g^2 E_bg) = 10^(snr/10).
double SnrGain(double e_main, double e_bg, double snr_db);

struct Mixture {
  FeatureSequence seq;  // transcript and anchor from the main utterance
  Placement placement;
  double gain = 1;
  FeatureMatrix background;  // cropped or tiled, before scaling
};

/// Mixes `main` with `background` (already cropped or tiled to the main
/// length). Energies are measured over the overlap, or over both full
/// segments when the shift leaves no overlap. The result is rounded to
/// 32-bit floats.
Mixture MixFeatures(const Utterance& main, const FeatureMatrix& background,
                    double snr_db, double shift_pct);

Mixture Mix(const MixtureSpec& spec, const Corpus& corpus);

/// 10 log10(E_main / E_bg) over the overlap, where the background is
/// recovered as mixture - main. +inf without overlap.
double MeasureSnr(const FeatureMatrix& mixture, const FeatureMatrix& main,
                  const Placement& placement);

struct ManifestEntry {
  MixtureSpec spec;
  TokenSequence transcript;
  Index anchor_len = 0;
  Index main_len = 0;
  Index offset = 0;
  double gain = 1;
  std::string features;  // relative to the manifest directory
};

struct MixtureManifest {
  std::string name;  // e.g. snr01_shift100
  Split split = Split::kTest;
  double snr_db = 0;
  double shift_pct = 0;
  std::vector<ManifestEntry> entries;
};

std::string CellName(double snr_db, double shift_pct);

/// One manifest per (SNR, shift) cell, all sharing the same main/background
/// pairs and crops. Backgrounds come from a different style of the same split.
std::vector<MixtureManifest> BuildEvalGrid(const Corpus& corpus, Split split,
                                           Index size, std::uint64_t seed);

/// Writes every mixture's features and <dir>/<cell>/manifest.json, filling in
/// gain, offset and feature paths.
void WriteGrid(std::vector<MixtureManifest>& grid, const Corpus& corpus,
               const std::filesystem::path& dir);
MixtureManifest LoadManifest(const std::filesystem::path& manifest_json);
std::vector<MixtureManifest> LoadGrid(const std::filesystem::path& dir);

/// An evaluation utterance read back from disk.
struct LoadedMixture {
  FeatureSequence seq;
  ManifestEntry entry;
};
std::vector<LoadedMixture> LoadMixtures(const MixtureManifest& m,
                                        const std::filesystem::path& dir);

struct TrainingMixerConfig {
  double p_mix = 0.5;
  double snr_db = 10;
  double shift_min_pct = 0;
  double shift_max_pct = 100;
  double p_clean_anchor = 0.8;
};

struct AugmentedUtterance {
  FeatureSequence seq;
  AnchorSpec anchor;
  bool mixed = false;
  double shift_pct = 0;
  std::string background_id;
};

/// On-the-fly augmentation of one training utterance, a pure function of
/// (seed, epoch, index). Backgrounds come from `pool` with a different style.
AugmentedUtterance AugmentTrainingUtterance(const Corpus& corpus,
                                            const std::vector<size_t>& pool,
                                            size_t utterance, const TrainingMixerConfig& cfg,
                                            std::uint64_t seed, std::uint64_t epoch);

}  // namespace anchored

#endif  // ANCHORED_MIXSIM_MIXING_HPP_
