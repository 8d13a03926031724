// transducer/networks.hpp

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

#ifndef ANCHORED_TRANSDUCER_NETWORKS_HPP_
#define ANCHORED_TRANSDUCER_NETWORKS_HPP_

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "anchored/transducer/config.hpp"
#include "anchored/transducer/layers.hpp"
#include "anchored/transducer/types.hpp"

namespace anchored {

/// Number of encoder frames produced from `raw_frames` input frames.
inline Index StackedLength(Index raw_frames, Index stack_factor) {
  return raw_frames / stack_factor;
}

/// Per-frame projection, frame stacking (subsampling) and a projection of
/// the stacked frame to d_model.
template <typename Scalar>
struct Frontend {
  Linear<Scalar> frame_proj;
  Linear<Scalar> stack_proj;
  Index stack_factor = 4;

  Frontend() = default;
  Frontend(const ModelConfig& cfg, std::mt19937_64& rng)
      : frame_proj(cfg.d_raw, cfg.front_dim, rng),
        stack_proj(cfg.front_dim * cfg.stack_factor, cfg.d_model, rng),
        stack_factor(cfg.stack_factor) {}

  /// [T_raw x d_raw] -> [floor(T_raw / stack) x d_model]. Trailing frames
  /// that do not fill a stack are dropped.
  Var<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& raw) {
    const Index t_raw = raw.rows();
    if (t_raw < stack_factor)
      throw std::invalid_argument("stack_features: " + std::to_string(t_raw) +
                                  " raw frames < stack factor " +
                                  std::to_string(stack_factor));
    const Index t = StackedLength(t_raw, stack_factor);
    Var<Scalar> p = frame_proj(tape, raw);
    if (t * stack_factor != t_raw) p = SliceRows(p, 0, t * stack_factor);
    Var<Scalar> stacked = Reshape(p, Shape{t, p.cols() * stack_factor});
    return stack_proj(tape, stacked);
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    frame_proj.VisitParams(prefix + ".frame_proj", f);
    stack_proj.VisitParams(prefix + ".stack_proj", f);
  }
};

/// Pre-norm self-attention block restricted to chunks: frame t attends to
/// every frame of its own chunk and of `left_chunks` preceding chunks.
template <typename Scalar>
struct ChunkedAttentionBlock {
  LayerNormLayer<Scalar> ln_attn;
  Linear<Scalar> query, key, value, out;
  LayerNormLayer<Scalar> ln_ffn;
  Linear<Scalar> ffn_in, ffn_out;
  Index chunk = 4;
  Index left_chunks = 2;

  ChunkedAttentionBlock() = default;
  ChunkedAttentionBlock(const ModelConfig& cfg, std::mt19937_64& rng)
      : ln_attn(cfg.d_model),
        query(cfg.d_model, cfg.d_model, rng),
        key(cfg.d_model, cfg.d_model, rng),
        value(cfg.d_model, cfg.d_model, rng),
        out(cfg.d_model, cfg.d_model, rng),
        ln_ffn(cfg.d_model),
        ffn_in(cfg.d_model, cfg.attention_ffn_dim, rng),
        ffn_out(cfg.attention_ffn_dim, cfg.d_model, rng),
        chunk(cfg.attention_chunk),
        left_chunks(cfg.attention_left_chunks) {}

  Var<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& x) {
    const Index t = x.rows();
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(x.cols()));
    Var<Scalar> y = ln_attn(tape, x);
    Var<Scalar> q = query(tape, y), k = key(tape, y), v = value(tape, y);
    std::vector<Var<Scalar>> ctx;
    for (Index cs = 0; cs < t; cs += chunk) {
      const Index ce = std::min(t, cs + chunk);
      const Index ks = std::max<Index>(0, cs - left_chunks * chunk);
      Var<Scalar> scores = Scale(
          MatMul(SliceRows(q, cs, ce), Transpose(SliceRows(k, ks, ce))), scale);
      ctx.push_back(MatMul(Softmax(scores), SliceRows(v, ks, ce)));
    }
    Var<Scalar> h = x + out(tape, ConcatRows(ctx));
    return h + ffn_out(tape, Relu(ffn_in(tape, ln_ffn(tape, h))));
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    ln_attn.VisitParams(prefix + ".ln_attn", f);
    query.VisitParams(prefix + ".query", f);
    key.VisitParams(prefix + ".key", f);
    value.VisitParams(prefix + ".value", f);
    out.VisitParams(prefix + ".out", f);
    ln_ffn.VisitParams(prefix + ".ln_ffn", f);
    ffn_in.VisitParams(prefix + ".ffn_in", f);
    ffn_out.VisitParams(prefix + ".ffn_out", f);
  }
};

/// Streaming encoder: unidirectional GRU stack (no lookahead) or chunked
/// attention (lookahead chunk - 1), followed by layer norm.
template <typename Scalar>
struct Encoder {
  EncoderKind kind = EncoderKind::kRecurrent;
  std::vector<Gru<Scalar>> recurrent;
  std::vector<ChunkedAttentionBlock<Scalar>> attention;
  LayerNormLayer<Scalar> norm;

  Encoder() = default;
  Encoder(const ModelConfig& cfg, std::mt19937_64& rng)
      : kind(cfg.encoder_kind), norm(cfg.d_model) {
    for (Index l = 0; l < cfg.encoder_layers; ++l) {
      if (kind == EncoderKind::kRecurrent)
        recurrent.emplace_back(cfg.d_model, cfg.d_model, rng);
      else
        attention.emplace_back(cfg, rng);
    }
  }

  Var<Scalar> operator()(Tape<Scalar>& tape, Var<Scalar> x) {
    if (x.rows() < 1) throw std::invalid_argument("encode: empty input");
    for (auto& layer : recurrent) x = layer(tape, x);
    for (auto& layer : attention) x = layer(tape, x);
    return norm(tape, x);
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    for (size_t l = 0; l < recurrent.size(); ++l)
      recurrent[l].VisitParams(prefix + ".gru" + std::to_string(l), f);
    for (size_t l = 0; l < attention.size(); ++l)
      attention[l].VisitParams(prefix + ".attn" + std::to_string(l), f);
    norm.VisitParams(prefix + ".norm", f);
  }
};

/// Label-history network. Row 0 of its output is the empty-history state.
template <typename Scalar>
struct Predictor {
  Embedding<Scalar> embed;
  std::vector<Gru<Scalar>> layers;
  LayerNormLayer<Scalar> norm;
  Index vocab_size = 0;

  Predictor() = default;
  Predictor(const ModelConfig& cfg, std::mt19937_64& rng)
      : embed(cfg.vocab_size + 1, cfg.d_model, rng),
        norm(cfg.d_model),
        vocab_size(cfg.vocab_size) {
    for (Index l = 0; l < cfg.predictor_layers; ++l)
      layers.emplace_back(cfg.d_model, cfg.d_model, rng);
  }

  /// [U+1 x d_model]: start symbol followed by y_1..y_U.
  Var<Scalar> operator()(Tape<Scalar>& tape, const TokenSequence& y) {
    y.Validate(static_cast<int>(vocab_size));
    std::vector<Index> ids{kBlank};
    for (int tok : y.tokens()) ids.push_back(tok);
    Var<Scalar> x = embed(tape, ids);
    for (auto& layer : layers) x = layer(tape, x);
    return norm(tape, x);
  }

  /// Recurrent state for incremental decoding, one row per layer.
  struct State {
    std::vector<Var<Scalar>> hidden;
  };

  State InitialState(Tape<Scalar>& tape) {
    State s;
    for (auto& layer : layers) s.hidden.push_back(layer.InitialState(tape));
    return s;
  }

  /// Consumes one label (kBlank for the start symbol) and returns the
  /// normalised output row.
  Var<Scalar> Step(Tape<Scalar>& tape, State& state, int token) {
    if (token < 0 || token > vocab_size)
      throw std::out_of_range("predictor token " + std::to_string(token));
    Var<Scalar> x = embed(tape, {static_cast<Index>(token)});
    for (size_t l = 0; l < layers.size(); ++l) {
      auto p = layers[l].Bind(tape);
      Var<Scalar> xproj = AddRow(MatMul(x, p.wi), p.bi);
      state.hidden[l] = Gru<Scalar>::Step(p, xproj, state.hidden[l]);
      x = state.hidden[l];
    }
    return norm(tape, x);
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    embed.VisitParams(prefix + ".embed", f);
    for (size_t l = 0; l < layers.size(); ++l)
      layers[l].VisitParams(prefix + ".gru" + std::to_string(l), f);
    norm.VisitParams(prefix + ".norm", f);
  }
};

/// Joint logits over (encoder frame, label history) pairs. Stored as
/// [T x (U+1) x (|Y|+1)]; label 0 of the last axis is blank.
template <typename Scalar>
struct LogitLattice {
  Var<Scalar> logits;
  Index frames = 0;   // T
  Index targets = 0;  // U
  Index labels = 0;   // |Y| + 1

  Index row(Index t, Index u) const { return t * (targets + 1) + u; }
};

/// Additive joiner: out(tanh(proj_f(f_t) + proj_g(g_u))).
template <typename Scalar>
struct Joiner {
  Linear<Scalar> proj_f;
  Linear<Scalar> proj_g;
  Linear<Scalar> out;

  Joiner() = default;
  Joiner(const ModelConfig& cfg, std::mt19937_64& rng)
      : proj_f(cfg.d_model, cfg.joiner_dim, rng),
        proj_g(cfg.d_model, cfg.joiner_dim, rng, /*with_bias=*/false),
        out(cfg.joiner_dim, cfg.vocab_size + 1, rng) {}

  LogitLattice<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& f,
                                  const Var<Scalar>& g) {
    if (f.cols() != proj_f.in_dim() || g.cols() != proj_g.in_dim())
      throw ShapeError("join: encoder width " + std::to_string(f.cols()) +
                       " / predictor width " + std::to_string(g.cols()) +
                       " != " + std::to_string(proj_f.in_dim()));
    Var<Scalar> hidden = Tanh(PairwiseSum(proj_f(tape, f), proj_g(tape, g)));
    LogitLattice<Scalar> lat;
    lat.logits = out(tape, hidden);
    lat.frames = f.rows();
    lat.targets = g.rows() - 1;
    lat.labels = out.out_dim();
    return lat;
  }

  /// Logits for one pre-projected encoder row and one predictor row.
  Var<Scalar> Single(Tape<Scalar>& tape, const Var<Scalar>& projected_f,
                     const Var<Scalar>& g) {
    return out(tape, Tanh(projected_f + proj_g(tape, g)));
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    proj_f.VisitParams(prefix + ".proj_f", f);
    proj_g.VisitParams(prefix + ".proj_g", f);
    out.VisitParams(prefix + ".out", f);
  }
};

}  // namespace anchored

#endif  // ANCHORED_TRANSDUCER_NETWORKS_HPP_
