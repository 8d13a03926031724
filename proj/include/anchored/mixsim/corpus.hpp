// mixsim/corpus.hpp

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

// Synthetic speech-like corpus. Every utterance is a wake-word prefix
// followed by random tokens, rendered frame by frame from per-token
// templates that each speaking style warps with a spectral tilt and shifts
// with an offset vector.

#ifndef ANCHORED_MIXSIM_CORPUS_HPP_
#define ANCHORED_MIXSIM_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "anchored/transducer/types.hpp"

namespace anchored {

enum class Split { kTrain, kDev, kTest };

std::string ToString(Split s);
Split ParseSplit(const std::string& s);

struct ToyCorpusConfig {
  int num_styles = 40;
  /// Styles [0, train_styles) are train, the next dev_styles are dev, the
  /// rest test.
  int train_styles = 30;
  int dev_styles = 5;
  int utterances_per_style = 60;
  int vocab_size = 16;
  Index feature_dim = 16;
  std::vector<int> wake_word{1, 2};
  /// Body tokens are drawn from [body_token_min, vocab_size].
  int body_token_min = 3;
  int body_len_min = 2;
  int body_len_max = 5;
  int frames_per_token_min = 8;
  int frames_per_token_max = 12;
  double template_std = 1.0;
  double style_offset_std = 1.0;
  double style_tilt_max = 0.5;
  double noise_std = 0.1;
  std::uint64_t seed = 1;

  void Validate() const;
};

struct Utterance {
  std::string id;
  int style = 0;
  Split split = Split::kTrain;
  TokenSequence tokens;
  Index anchor_len = 0;  // raw frames covered by the wake word
  std::vector<int> frame_labels;
  FeatureMatrix features;
};

struct Corpus {
  ToyCorpusConfig config;
  /// Mean of the train-split frames, already subtracted from all features.
  RowVector<double> train_mean;
  std::vector<Utterance> utterances;

  const Utterance& Get(const std::string& id) const;
  std::vector<size_t> Indices(Split split) const;
  void BuildIndex();

 private:
  std::map<std::string, size_t> index_;
};

Corpus SynthCorpus(const ToyCorpusConfig& cfg);

FeatureSequence ToFeatureSequence(const Utterance& u);

/// corpus.json plus feats/<id>.feat under `dir`.
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus LoadCorpus(const std::filesystem::path& dir);

}  // namespace anchored

#endif  // ANCHORED_MIXSIM_CORPUS_HPP_
