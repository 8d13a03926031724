// corpus.cpp

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

#include "anchored/mixsim/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "anchored/mixsim/features_io.hpp"
#include "anchored/util/seed.hpp"

namespace anchored {

using nlohmann::json;

std::string ToString(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

Split ParseSplit(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + s + "'");
}

void ToyCorpusConfig::Validate() const {
  auto req = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("corpus config: " + what);
  };
  req(num_styles >= 3, "num_styles >= 3");
  req(train_styles >= 1 && dev_styles >= 1 && train_styles + dev_styles < num_styles,
      "train, dev and test each need at least one style");
  req(utterances_per_style >= 1, "utterances_per_style >= 1");
  req(vocab_size >= 2, "vocab_size >= 2");
  req(feature_dim >= 1, "feature_dim >= 1");
  req(!wake_word.empty(), "wake_word must be nonempty");
  for (int t : wake_word) req(t >= 1 && t <= vocab_size, "wake_word tokens in [1, vocab]");
  req(body_token_min >= 1 && body_token_min < vocab_size,
      "body tokens need at least two ids");
  req(body_len_min >= 0 && body_len_min <= body_len_max, "body length range");
  req(frames_per_token_min >= 1 && frames_per_token_min <= frames_per_token_max,
      "frames per token range");
  req(template_std > 0 && style_offset_std >= 0 && style_tilt_max >= 0 && noise_std >= 0,
      "scales must be non-negative");
}

const Utterance& Corpus::Get(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown utterance id '" + id + "'");
  return utterances[it->second];
}

std::vector<size_t> Corpus::Indices(Split split) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < utterances.size(); ++i)
    if (utterances[i].split == split) out.push_back(i);
  return out;
}

void Corpus::BuildIndex() {
  index_.clear();
  for (size_t i = 0; i < utterances.size(); ++i) {
    if (!index_.emplace(utterances[i].id, i).second)
      throw std::invalid_argument("duplicate utterance id " + utterances[i].id);
  }
}

namespace {

struct Template {
  RowVector<double> start, end;
};

struct Style {
  RowVector<double> offset;
  RowVector<double> tilt;  // per-dimension gain
};

RowVector<double> Gaussian(std::mt19937_64& rng, Index d, double std) {
  std::normal_distribution<double> n(0.0, std);
  RowVector<double> v(d);
  for (Index j = 0; j < d; ++j) v(j) = n(rng);
  return v;
}

Split SplitOfStyle(const ToyCorpusConfig& c, int style) {
  if (style < c.train_styles) return Split::kTrain;
  if (style < c.train_styles + c.dev_styles) return Split::kDev;
  return Split::kTest;
}

std::string UtteranceId(int style, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%03d_u%04d", style, index);
  return buf;
}

}  // namespace

Corpus SynthCorpus(const ToyCorpusConfig& cfg) {
  cfg.Validate();
  const Index d = cfg.feature_dim;
  std::vector<Template> templates(static_cast<size_t>(cfg.vocab_size) + 1);
  {
    std::mt19937_64 rng(DeriveSeed({cfg.seed, 0}));
    for (int k = 1; k <= cfg.vocab_size; ++k)
      templates[k] = {Gaussian(rng, d, cfg.template_std), Gaussian(rng, d, cfg.template_std)};
  }
  std::vector<Style> styles;
  for (int s = 0; s < cfg.num_styles; ++s) {
    std::mt19937_64 rng(DeriveSeed({cfg.seed, 1, std::uint64_t(s)}));
    Style st;
    st.offset = Gaussian(rng, d, cfg.style_offset_std);
    const double tilt =
        std::uniform_real_distribution<double>(-cfg.style_tilt_max, cfg.style_tilt_max)(rng);
    st.tilt.resize(d);
    for (Index j = 0; j < d; ++j) {
      const double pos = d > 1 ? 2.0 * double(j) / double(d - 1) - 1.0 : 0.0;
      st.tilt(j) = std::exp(tilt * pos);
    }
    styles.push_back(std::move(st));
  }

  Corpus corpus;
  corpus.config = cfg;
  for (int s = 0; s < cfg.num_styles; ++s) {
    for (int i = 0; i < cfg.utterances_per_style; ++i) {
      std::mt19937_64 rng(DeriveSeed({cfg.seed, 2, std::uint64_t(s), std::uint64_t(i)}));
      std::vector<int> tokens = cfg.wake_word;
      const int body =
          std::uniform_int_distribution<int>(cfg.body_len_min, cfg.body_len_max)(rng);
      std::uniform_int_distribution<int> pick(cfg.body_token_min, cfg.vocab_size);
      for (int b = 0; b < body; ++b) {
        int t;
        do {
          t = pick(rng);
        } while (t == tokens.back());
        tokens.push_back(t);
      }
      std::uniform_int_distribution<int> dur(cfg.frames_per_token_min,
                                             cfg.frames_per_token_max);
      std::normal_distribution<double> noise(0.0, cfg.noise_std);
      Utterance u;
      u.id = UtteranceId(s, i);
      u.style = s;
      u.split = SplitOfStyle(cfg, s);
      std::vector<RowVector<double>> rows;
      for (size_t k = 0; k < tokens.size(); ++k) {
        const int n = dur(rng);
        const Template& tp = templates[tokens[k]];
        for (int f = 0; f < n; ++f) {
          const double a = n > 1 ? double(f) / double(n - 1) : 0.0;
          RowVector<double> v = (1.0 - a) * tp.start + a * tp.end;
          v = v.cwiseProduct(styles[s].tilt) + styles[s].offset;
          for (Index j = 0; j < d; ++j) v(j) += noise(rng);
          rows.push_back(std::move(v));
          u.frame_labels.push_back(tokens[k]);
        }
        if (k + 1 == cfg.wake_word.size()) u.anchor_len = static_cast<Index>(rows.size());
      }
      u.features.resize(static_cast<Index>(rows.size()), d);
      for (size_t r = 0; r < rows.size(); ++r) u.features.row(r) = rows[r];
      u.tokens = TokenSequence(std::move(tokens));
      corpus.utterances.push_back(std::move(u));
    }
  }

  RowVector<double> sum = RowVector<double>::Zero(d);
  Index count = 0;
  for (const auto& u : corpus.utterances) {
    if (u.split != Split::kTrain) continue;
    sum += u.features.colwise().sum();
    count += u.features.rows();
  }
  corpus.train_mean = sum / double(count);
  for (auto& u : corpus.utterances)
    u.features = RoundToFloat(u.features.rowwise() - corpus.train_mean);
  corpus.BuildIndex();
  return corpus;
}

FeatureSequence ToFeatureSequence(const Utterance& u) {
  FeatureSequence s;
  s.id = u.id;
  s.frames = u.features;
  s.transcript = u.tokens;
  s.anchor_len_frames = u.anchor_len;
  s.frame_labels = u.frame_labels;
  return s;
}

namespace {

json ConfigToJson(const ToyCorpusConfig& c) {
  return {{"num_styles", c.num_styles},
          {"train_styles", c.train_styles},
          {"dev_styles", c.dev_styles},
          {"utterances_per_style", c.utterances_per_style},
          {"vocab_size", c.vocab_size},
          {"feature_dim", c.feature_dim},
          {"wake_word", c.wake_word},
          {"body_token_min", c.body_token_min},
          {"body_len_min", c.body_len_min},
          {"body_len_max", c.body_len_max},
          {"frames_per_token_min", c.frames_per_token_min},
          {"frames_per_token_max", c.frames_per_token_max},
          {"template_std", c.template_std},
          {"style_offset_std", c.style_offset_std},
          {"style_tilt_max", c.style_tilt_max},
          {"noise_std", c.noise_std},
          {"seed", c.seed}};
}

ToyCorpusConfig ConfigFromJson(const json& j) {
  ToyCorpusConfig c;
  c.num_styles = j.at("num_styles");
  c.train_styles = j.at("train_styles");
  c.dev_styles = j.at("dev_styles");
  c.utterances_per_style = j.at("utterances_per_style");
  c.vocab_size = j.at("vocab_size");
  c.feature_dim = j.at("feature_dim");
  c.wake_word = j.at("wake_word").get<std::vector<int>>();
  c.body_token_min = j.at("body_token_min");
  c.body_len_min = j.at("body_len_min");
  c.body_len_max = j.at("body_len_max");
  c.frames_per_token_min = j.at("frames_per_token_min");
  c.frames_per_token_max = j.at("frames_per_token_max");
  c.template_std = j.at("template_std");
  c.style_offset_std = j.at("style_offset_std");
  c.style_tilt_max = j.at("style_tilt_max");
  c.noise_std = j.at("noise_std");
  c.seed = j.at("seed");
  return c;
}

}  // namespace

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "feats");
  json utts = json::array();
  for (const auto& u : corpus.utterances) {
    const std::string rel = "feats/" + u.id + ".feat";
    WriteFeatures(dir / rel, u.features);
    utts.push_back({{"id", u.id},
                    {"style", u.style},
                    {"split", ToString(u.split)},
                    {"tokens", u.tokens.tokens()},
                    {"anchor_len", u.anchor_len},
                    {"num_frames", u.features.rows()},
                    {"frame_labels", u.frame_labels},
                    {"features", rel}});
  }
  std::vector<double> mean(corpus.train_mean.data(),
                           corpus.train_mean.data() + corpus.train_mean.size());
  json j = {{"format", "anchored-toy-corpus"},
            {"version", 1},
            {"config", ConfigToJson(corpus.config)},
            {"train_mean", mean},
            {"utterances", utts}};
  std::ofstream os(dir / "corpus.json", std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + (dir / "corpus.json").string());
  os << j.dump(1) << "\n";
}

Corpus LoadCorpus(const std::filesystem::path& dir) {
  const auto path = dir / "corpus.json";
  std::ifstream is(path);
  if (!is) throw std::runtime_error("missing corpus manifest " + path.string());
  json j = json::parse(is);
  Corpus c;
  c.config = ConfigFromJson(j.at("config"));
  auto mean = j.at("train_mean").get<std::vector<double>>();
  c.train_mean = Eigen::Map<RowVector<double>>(mean.data(), Index(mean.size()));
  for (const auto& ju : j.at("utterances")) {
    Utterance u;
    u.id = ju.at("id");
    u.style = ju.at("style");
    u.split = ParseSplit(ju.at("split"));
    u.tokens = TokenSequence(ju.at("tokens").get<std::vector<int>>());
    u.anchor_len = ju.at("anchor_len");
    u.frame_labels = ju.at("frame_labels").get<std::vector<int>>();
    u.features = ReadFeatures(dir / ju.at("features").get<std::string>());
    if (u.features.rows() != ju.at("num_frames").get<Index>())
      throw std::runtime_error("feature file for " + u.id + " has " +
                               std::to_string(u.features.rows()) + " frames, manifest says " +
                               ju.at("num_frames").dump());
    c.utterances.push_back(std::move(u));
  }
  c.BuildIndex();
  return c;
}

}  // namespace anchored
