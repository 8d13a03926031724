// anchoring/anchored_model.hpp

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

#ifndef ANCHORED_ANCHORING_ANCHORED_MODEL_HPP_
#define ANCHORED_ANCHORING_ANCHORED_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anchored/anchoring/anchor_spec.hpp"
#include "anchored/anchoring/aux_net.hpp"
#include "anchored/anchoring/gating.hpp"
#include "anchored/aux_objectives/objectives.hpp"
#include "anchored/baselines/anchor_mean.hpp"
#include "anchored/transducer/decoder.hpp"
#include "anchored/transducer/networks.hpp"

namespace anchored {

/// Transducer plus every optional component selected by its ModelConfig:
/// the auxiliary network, encoder-input projection, anchor-mean transform
/// and the training-only heads.
template <typename Scalar>
class AnchoredModel {
 public:
  /// Encoder-side quantities of one utterance.
  struct Encoded {
    Var<Scalar> f;          // [T x d_model]
    Var<Scalar> context;    // [1 x D], when the aux net ran
    Var<Scalar> anchor;     // stacked anchor frames [T_w_enc x stack*d_raw]
    Var<Scalar> gate;       // [T x 1], when gating is enabled
    FeatureMatrix anchor_raw;
  };

  struct Output {
    LogitLattice<Scalar> lattice;
    Encoded enc;
  };

  struct Hypothesis {
    TokenSequence tokens;
    std::vector<double> gate;  // per encoder frame, empty without gating
  };

  ModelConfig config;
  Frontend<Scalar> frontend;
  Encoder<Scalar> encoder;
  Predictor<Scalar> predictor;
  Joiner<Scalar> joiner;
  std::optional<AuxNet<Scalar>> aux;
  std::optional<Linear<Scalar>> bias_proj;
  std::optional<FrNetwork<Scalar>> fr;
  std::optional<Expander<Scalar>> expander;
  std::optional<AmcTransform<Scalar>> amc;

  AnchoredModel() = default;
  AnchoredModel(const ModelConfig& cfg, std::uint64_t seed) : config(cfg) {
    cfg.Validate();
    std::mt19937_64 rng(seed);
    frontend = Frontend<Scalar>(cfg, rng);
    encoder = Encoder<Scalar>(cfg, rng);
    predictor = Predictor<Scalar>(cfg, rng);
    joiner = Joiner<Scalar>(cfg, rng);
    if (cfg.uses_aux_net()) {
      aux.emplace(cfg, rng);
      bias_proj.emplace(cfg.d_model + cfg.context_dim, cfg.d_model, rng,
                        /*with_bias=*/false);
      fr.emplace(cfg, rng);
      expander.emplace(cfg, rng);
    }
    if (cfg.baseline == BaselineKind::kAmc) amc.emplace(cfg.d_raw);
  }

  /// Context embedding of raw anchor frames.
  Var<Scalar> Context(Tape<Scalar>& tape, const Var<Scalar>& stacked_anchor) {
    RequireAux();
    return (*aux)(tape, stacked_anchor);
  }

  Var<Scalar> StackedAnchor(Tape<Scalar>& tape, const FeatureMatrix& anchor_raw) {
    if (anchor_raw.rows() < config.stack_factor)
      throw std::invalid_argument(
          "anchor of " + std::to_string(anchor_raw.rows()) +
          " raw frames is shorter than one encoder frame");
    return tape.Constant(StackRawFrames<Scalar>(anchor_raw, config.stack_factor));
  }

  Encoded Encode(Tape<Scalar>& tape, const FeatureSequence& seq,
                 const AnchorSpec& anchor, bool enable_bias, bool enable_gating) {
    Encoded e;
    Var<Scalar> raw = tape.Constant(Matrix<Scalar>(seq.frames.cast<Scalar>()));
    const bool needs_anchor = enable_bias || enable_gating ||
                              config.baseline != BaselineKind::kNone;
    if (needs_anchor) e.anchor_raw = anchor.Frames(seq);
    if (config.baseline != BaselineKind::kNone) {
      Var<Scalar> mean = tape.Constant(
          Matrix<Scalar>(AnchorMean(e.anchor_raw).template cast<Scalar>()));
      if (config.baseline == BaselineKind::kAms) {
        raw = ApplyAms(raw, mean);
      } else {
        raw = (*amc)(tape, raw, mean);
      }
    }
    if (enable_bias || enable_gating) {
      e.anchor = StackedAnchor(tape, e.anchor_raw);
      e.context = Context(tape, e.anchor);
    }
    Var<Scalar> x = frontend(tape, raw);
    if (enable_bias) x = BiasEncoderInputs(tape, x, e.context, *bias_proj);
    e.f = encoder(tape, x);
    if (enable_gating) {
      Var<Scalar> frames = tape.Constant(
          StackRawFrames<Scalar>(seq.frames, config.stack_factor));
      e.gate = FrameGateBias(
          e.context, SubsegmentEmbeddings(tape, *aux, frames, config.subsegment));
    }
    return e;
  }

  Output Forward(Tape<Scalar>& tape, const FeatureSequence& seq,
                 const AnchorSpec& anchor, bool enable_bias, bool enable_gating) {
    Output out;
    out.enc = Encode(tape, seq, anchor, enable_bias, enable_gating);
    out.lattice = joiner(tape, out.enc.f, predictor(tape, seq.transcript));
    if (enable_gating) out.lattice = ApplyJoinerGating(out.lattice, out.enc.gate);
    return out;
  }

  Output Forward(Tape<Scalar>& tape, const FeatureSequence& seq,
                 const AnchorSpec& anchor) {
    return Forward(tape, seq, anchor, config.enable_bias, config.enable_gating);
  }

  /// Greedy decoding with the configured anchoring, on a no-grad tape.
  Hypothesis Decode(const FeatureSequence& seq, const AnchorSpec& anchor) {
    Tape<Scalar> tape(GradMode::kDisabled);
    Encoded e = Encode(tape, seq, anchor, config.enable_bias, config.enable_gating);
    Hypothesis h;
    std::vector<Scalar> gate;
    if (config.enable_gating) {
      const auto& g = e.gate.value();
      gate.assign(g.data(), g.data() + g.size());
      h.gate.assign(gate.begin(), gate.end());
    }
    h.tokens = GreedyDecode(tape, predictor, joiner, e.f,
                            config.enable_gating ? &gate : nullptr);
    return h;
  }

  /// Visits every parameter tensor in a fixed order with a dotted name.
  template <typename F>
  void VisitParams(F&& f) {
    frontend.VisitParams("frontend", f);
    encoder.VisitParams("encoder", f);
    predictor.VisitParams("predictor", f);
    joiner.VisitParams("joiner", f);
    if (aux) aux->VisitParams("aux", f);
    if (bias_proj) bias_proj->VisitParams("bias_proj", f);
    if (fr) fr->VisitParams("fr", f);
    if (expander) expander->VisitParams("expander", f);
    if (amc) amc->VisitParams("amc", f);
  }

  std::vector<std::pair<std::string, Tensor<Scalar>*>> NamedParameters() {
    std::vector<std::pair<std::string, Tensor<Scalar>*>> out;
    VisitParams([&](const std::string& n, Tensor<Scalar>& t) {
      out.emplace_back(n, &t);
    });
    return out;
  }

  Index NumParameters() {
    Index n = 0;
    VisitParams([&](const std::string&, Tensor<Scalar>& t) { n += t.numel(); });
    return n;
  }

  /// Copies parameter values from a model of the same configuration,
  /// converting precision.
  template <typename Other>
  void CopyParamsFrom(AnchoredModel<Other>& src) {
    auto from = src.NamedParameters();
    auto to = NamedParameters();
    if (from.size() != to.size())
      throw std::invalid_argument("copy params: parameter lists differ");
    for (size_t i = 0; i < to.size(); ++i) {
      if (from[i].first != to[i].first ||
          from[i].second->shape() != to[i].second->shape())
        throw std::invalid_argument("copy params: mismatch at " + to[i].first);
      to[i].second->data() = from[i].second->data().template cast<Scalar>();
    }
  }

 private:
  void RequireAux() const {
    if (!aux)
      throw std::logic_error("anchoring requested but the model has no aux net");
  }
};

}  // namespace anchored

#endif  // ANCHORED_ANCHORING_ANCHORED_MODEL_HPP_
