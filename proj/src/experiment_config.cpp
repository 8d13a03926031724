// experiment_config.cpp

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

#include "anchored/pipeline/experiment_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace anchored {

using nlohmann::json;

namespace {

// Reads fields of one JSON object into existing values and rejects keys
// that no field claimed.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void Get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  template <typename T, typename Parse>
  void GetEnum(const char* key, T& out, Parse parse) {
    std::string s;
    Get(key, s);
    if (!j_.contains(key)) return;
    try {
      out = parse(s);
    } catch (const std::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* Child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void Finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key \"" + k + "\"");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void ReadSubsegment(const json& j, SubsegmentConfig& s) {
  Reader r(j, "model.subsegment");
  r.Get("block", s.block);
  r.Get("left_ctx", s.left_ctx);
  r.Get("right_ctx", s.right_ctx);
  r.Finish();
}

void ReadModel(const json& j, ModelConfig& m) {
  Reader r(j, "model");
  r.Get("d_raw", m.d_raw);
  r.Get("front_dim", m.front_dim);
  r.Get("stack_factor", m.stack_factor);
  r.Get("d_model", m.d_model);
  r.GetEnum("encoder_kind", m.encoder_kind, ParseEncoderKind);
  r.Get("encoder_layers", m.encoder_layers);
  r.Get("attention_chunk", m.attention_chunk);
  r.Get("attention_left_chunks", m.attention_left_chunks);
  r.Get("attention_ffn_dim", m.attention_ffn_dim);
  r.Get("predictor_layers", m.predictor_layers);
  r.Get("joiner_dim", m.joiner_dim);
  r.Get("vocab_size", m.vocab_size);
  r.Get("enable_bias", m.enable_bias);
  r.Get("enable_gating", m.enable_gating);
  r.Get("context_dim", m.context_dim);
  r.Get("aux_hidden", m.aux_hidden);
  r.Get("aux_kernel", m.aux_kernel);
  if (const json* s = r.Child("subsegment")) ReadSubsegment(*s, m.subsegment);
  r.GetEnum("baseline", m.baseline, ParseBaselineKind);
  r.Get("num_frame_labels", m.num_frame_labels);
  r.Get("fr_label_dim", m.fr_label_dim);
  r.Get("fr_hidden", m.fr_hidden);
  r.Get("expander_dim", m.expander_dim);
  r.Get("expander_hidden", m.expander_hidden);
  r.Get("precision", m.precision);
  r.Finish();
}

void ReadCorpus(const json& j, ToyCorpusConfig& c) {
  Reader r(j, "corpus");
  r.Get("num_styles", c.num_styles);
  r.Get("train_styles", c.train_styles);
  r.Get("dev_styles", c.dev_styles);
  r.Get("utterances_per_style", c.utterances_per_style);
  r.Get("vocab_size", c.vocab_size);
  r.Get("feature_dim", c.feature_dim);
  r.Get("wake_word", c.wake_word);
  r.Get("body_token_min", c.body_token_min);
  r.Get("body_len_min", c.body_len_min);
  r.Get("body_len_max", c.body_len_max);
  r.Get("frames_per_token_min", c.frames_per_token_min);
  r.Get("frames_per_token_max", c.frames_per_token_max);
  r.Get("template_std", c.template_std);
  r.Get("style_offset_std", c.style_offset_std);
  r.Get("style_tilt_max", c.style_tilt_max);
  r.Get("noise_std", c.noise_std);
  r.Finish();
}

void ReadMixer(const json& j, TrainingMixerConfig& m) {
  Reader r(j, "mixer");
  r.Get("p_mix", m.p_mix);
  r.Get("snr_db", m.snr_db);
  r.Get("shift_min_pct", m.shift_min_pct);
  r.Get("shift_max_pct", m.shift_max_pct);
  r.Get("p_clean_anchor", m.p_clean_anchor);
  r.Finish();
}

void ReadWeights(const json& j, LossWeights& w) {
  Reader r(j, "loss_weights");
  r.Get("lambda_fr", w.lambda_fr);
  r.Get("gamma", w.gamma);
  r.Get("mu", w.mu);
  r.Get("nu", w.nu);
  r.Get("variance_eps", w.variance_eps);
  r.Finish();
}

void ReadOptimizer(const json& j, OptimizerConfig& o) {
  Reader r(j, "optimizer");
  r.Get("learning_rate", o.learning_rate);
  r.Get("beta1", o.beta1);
  r.Get("beta2", o.beta2);
  r.Get("epsilon", o.epsilon);
  r.Get("warmup_steps", o.warmup_steps);
  r.Get("epochs", o.epochs);
  r.Get("batch_size", o.batch_size);
  r.Get("grad_clip", o.grad_clip);
  r.Get("dev_utterances", o.dev_utterances);
  r.Finish();
}

void ReadEval(const json& j, EvalConfig& e) {
  Reader r(j, "eval");
  r.GetEnum("split", e.split, ParseSplit);
  r.Get("utterances_per_cell", e.utterances_per_cell);
  r.Get("gate_cell", e.gate_cell);
  r.Finish();
}

void ReadSeeds(const json& j, SeedConfig& s) {
  Reader r(j, "seeds");
  r.Get("corpus", s.corpus);
  r.Get("model", s.model);
  r.Get("train", s.train);
  r.Get("eval", s.eval);
  r.Finish();
}

}  // namespace

void OptimizerConfig::Validate() const {
  auto req = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("optimizer: ") + what);
  };
  req(learning_rate > 0, "learning_rate > 0");
  req(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1, "betas in [0, 1)");
  req(epsilon > 0, "epsilon > 0");
  req(warmup_steps >= 0, "warmup_steps >= 0");
  req(epochs >= 0, "epochs >= 0");
  req(batch_size >= 1, "batch_size >= 1");
  req(grad_clip > 0, "grad_clip > 0");
  req(dev_utterances >= 0, "dev_utterances >= 0");
}

void ExperimentConfig::Validate() const {
  try {
    model.Validate();
    loss_weights.Validate();
    corpus.Validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  optimizer.Validate();
  if (model.d_raw != corpus.feature_dim)
    throw ConfigError("model.d_raw " + std::to_string(model.d_raw) +
                      " differs from corpus.feature_dim " +
                      std::to_string(corpus.feature_dim));
  if (model.vocab_size != corpus.vocab_size)
    throw ConfigError("model.vocab_size differs from corpus.vocab_size");
  if (model.num_frame_labels < corpus.vocab_size + 1)
    throw ConfigError("model.num_frame_labels must cover every token id and 0");
  if (objective != ObjectiveMode::kNone && !model.uses_aux_net())
    throw ConfigError("objective " + ToString(objective) +
                      " needs anchoring (enable_bias or enable_gating)");
  if (mixer.p_mix < 0 || mixer.p_mix > 1 || mixer.p_clean_anchor < 0 ||
      mixer.p_clean_anchor > 1)
    throw ConfigError("mixer probabilities must lie in [0, 1]");
  if (mixer.shift_min_pct < 0 || mixer.shift_max_pct < mixer.shift_min_pct)
    throw ConfigError("mixer shift range is empty or negative");
  if (eval.utterances_per_cell < 1) throw ConfigError("eval.utterances_per_cell >= 1");
  if (output_dir.empty() && !std::getenv("ANCHORED_OUTPUT_ROOT"))
    throw ConfigError("output_dir is empty");
}

std::filesystem::path ExperimentConfig::OutputDir() const {
  if (const char* root = std::getenv("ANCHORED_OUTPUT_ROOT"); root && *root)
    return root;
  return output_dir;
}

std::filesystem::path ExperimentConfig::CorpusDir() const {
  return corpus_dir.empty() ? OutputDir() / "corpus" : std::filesystem::path(corpus_dir);
}

std::filesystem::path ExperimentConfig::GridDir() const {
  return grid_dir.empty() ? OutputDir() / "grid" : std::filesystem::path(grid_dir);
}

json ToJson(const ModelConfig& m) {
  return {{"d_raw", m.d_raw},
          {"front_dim", m.front_dim},
          {"stack_factor", m.stack_factor},
          {"d_model", m.d_model},
          {"encoder_kind", ToString(m.encoder_kind)},
          {"encoder_layers", m.encoder_layers},
          {"attention_chunk", m.attention_chunk},
          {"attention_left_chunks", m.attention_left_chunks},
          {"attention_ffn_dim", m.attention_ffn_dim},
          {"predictor_layers", m.predictor_layers},
          {"joiner_dim", m.joiner_dim},
          {"vocab_size", m.vocab_size},
          {"enable_bias", m.enable_bias},
          {"enable_gating", m.enable_gating},
          {"context_dim", m.context_dim},
          {"aux_hidden", m.aux_hidden},
          {"aux_kernel", m.aux_kernel},
          {"subsegment",
           {{"block", m.subsegment.block},
            {"left_ctx", m.subsegment.left_ctx},
            {"right_ctx", m.subsegment.right_ctx}}},
          {"baseline", ToString(m.baseline)},
          {"num_frame_labels", m.num_frame_labels},
          {"fr_label_dim", m.fr_label_dim},
          {"fr_hidden", m.fr_hidden},
          {"expander_dim", m.expander_dim},
          {"expander_hidden", m.expander_hidden},
          {"precision", m.precision}};
}

ModelConfig ModelConfigFromJson(const json& j) {
  ModelConfig m;
  ReadModel(j, m);
  return m;
}

json ToJson(const ExperimentConfig& c) {
  const ToyCorpusConfig& k = c.corpus;
  const LossWeights& w = c.loss_weights;
  const OptimizerConfig& o = c.optimizer;
  return {
      {"name", c.name},
      {"output_dir", c.output_dir},
      {"corpus_dir", c.corpus_dir},
      {"grid_dir", c.grid_dir},
      {"model", ToJson(c.model)},
      {"objective", ToString(c.objective)},
      {"loss_weights",
       {{"lambda_fr", w.lambda_fr},
        {"gamma", w.gamma},
        {"mu", w.mu},
        {"nu", w.nu},
        {"variance_eps", w.variance_eps}}},
      {"optimizer",
       {{"learning_rate", o.learning_rate},
        {"beta1", o.beta1},
        {"beta2", o.beta2},
        {"epsilon", o.epsilon},
        {"warmup_steps", o.warmup_steps},
        {"epochs", o.epochs},
        {"batch_size", o.batch_size},
        {"grad_clip", o.grad_clip},
        {"dev_utterances", o.dev_utterances}}},
      {"corpus",
       {{"num_styles", k.num_styles},
        {"train_styles", k.train_styles},
        {"dev_styles", k.dev_styles},
        {"utterances_per_style", k.utterances_per_style},
        {"vocab_size", k.vocab_size},
        {"feature_dim", k.feature_dim},
        {"wake_word", k.wake_word},
        {"body_token_min", k.body_token_min},
        {"body_len_min", k.body_len_min},
        {"body_len_max", k.body_len_max},
        {"frames_per_token_min", k.frames_per_token_min},
        {"frames_per_token_max", k.frames_per_token_max},
        {"template_std", k.template_std},
        {"style_offset_std", k.style_offset_std},
        {"style_tilt_max", k.style_tilt_max},
        {"noise_std", k.noise_std}}},
      {"mixer",
       {{"p_mix", c.mixer.p_mix},
        {"snr_db", c.mixer.snr_db},
        {"shift_min_pct", c.mixer.shift_min_pct},
        {"shift_max_pct", c.mixer.shift_max_pct},
        {"p_clean_anchor", c.mixer.p_clean_anchor}}},
      {"eval",
       {{"split", ToString(c.eval.split)},
        {"utterances_per_cell", c.eval.utterances_per_cell},
        {"gate_cell", c.eval.gate_cell}}},
      {"seeds",
       {{"corpus", c.seeds.corpus},
        {"model", c.seeds.model},
        {"train", c.seeds.train},
        {"eval", c.seeds.eval}}}};
}

ExperimentConfig ExperimentConfigFromJson(const json& j) {
  ExperimentConfig c;
  Reader r(j, "config");
  r.Get("name", c.name);
  r.Get("output_dir", c.output_dir);
  r.Get("corpus_dir", c.corpus_dir);
  r.Get("grid_dir", c.grid_dir);
  if (const json* x = r.Child("model")) ReadModel(*x, c.model);
  r.GetEnum("objective", c.objective, ParseObjectiveMode);
  if (const json* x = r.Child("loss_weights")) ReadWeights(*x, c.loss_weights);
  if (const json* x = r.Child("optimizer")) ReadOptimizer(*x, c.optimizer);
  if (const json* x = r.Child("corpus")) ReadCorpus(*x, c.corpus);
  if (const json* x = r.Child("mixer")) ReadMixer(*x, c.mixer);
  if (const json* x = r.Child("eval")) ReadEval(*x, c.eval);
  if (const json* x = r.Child("seeds")) ReadSeeds(*x, c.seeds);
  r.Finish();
  c.corpus.seed = c.seeds.corpus;
  c.Validate();
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return ExperimentConfigFromJson(j);
}

void SaveExperimentConfig(const ExperimentConfig& c, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ToJson(c).dump(2) << "\n";
}

}  // namespace anchored
