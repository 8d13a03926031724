// aux_objectives/objectives.hpp

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

// Training-only objectives on the context embedding: reconstruction of the
// anchor from frame labels and c, and variance-invariance-covariance
// regularisation of the two anchor halves.

#ifndef ANCHORED_AUX_OBJECTIVES_OBJECTIVES_HPP_
#define ANCHORED_AUX_OBJECTIVES_OBJECTIVES_HPP_

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "anchored/transducer/config.hpp"
#include "anchored/transducer/layers.hpp"

namespace anchored {

struct LossWeights {
  double lambda_fr = 0.1;
  double gamma = 1.0;  // variance
  double mu = 1.0;     // invariance
  double nu = 0.05;    // covariance
  /// Added to the variance inside the square root.
  double variance_eps = 1e-4;

  void Validate() const {
    if (lambda_fr < 0 || gamma < 0 || mu < 0 || nu < 0 || variance_eps < 0)
      throw std::invalid_argument("loss weights must be non-negative");
  }
};

enum class ObjectiveMode { kNone, kFr, kVic, kBoth };

std::string ToString(ObjectiveMode m);
ObjectiveMode ParseObjectiveMode(const std::string& s);

inline bool UsesFr(ObjectiveMode m) {
  return m == ObjectiveMode::kFr || m == ObjectiveMode::kBoth;
}
inline bool UsesVic(ObjectiveMode m) {
  return m == ObjectiveMode::kVic || m == ObjectiveMode::kBoth;
}

/// x_hat_t = W2 ReLU(W1 [embed(s_t), c] + b1) + b2.
template <typename Scalar>
struct FrNetwork {
  Embedding<Scalar> labels;
  Linear<Scalar> hidden;
  Linear<Scalar> out;

  FrNetwork() = default;
  FrNetwork(const ModelConfig& cfg, std::mt19937_64& rng)
      : labels(cfg.num_frame_labels, cfg.fr_label_dim, rng),
        hidden(cfg.fr_label_dim + cfg.context_dim, cfg.fr_hidden, rng),
        out(cfg.fr_hidden, cfg.d_raw, rng) {}

  Index num_labels() const { return labels.table.shape()[0]; }

  Var<Scalar> operator()(Tape<Scalar>& tape, const std::vector<int>& s,
                         const Var<Scalar>& c) {
    std::vector<Index> ids;
    ids.reserve(s.size());
    for (int l : s) {
      if (l < 0 || l >= num_labels())
        throw std::out_of_range("feature reconstruction: label " +
                                std::to_string(l) + " outside [0, " +
                                std::to_string(num_labels()) + ")");
      ids.push_back(l);
    }
    Var<Scalar> e = labels(tape, ids);
    Var<Scalar> in = ConcatCols(e, RepeatRow(c, e.rows()));
    return out(tape, Relu(hidden(tape, in)));
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    labels.VisitParams(prefix + ".labels", f);
    hidden.VisitParams(prefix + ".hidden", f);
    out.VisitParams(prefix + ".out", f);
  }
};

/// MSE between the anchor frames and their reconstruction.
template <typename Scalar>
Var<Scalar> FeatureReconstructionLoss(Tape<Scalar>& tape, FrNetwork<Scalar>& fr,
                                      const std::vector<int>& s,
                                      const Var<Scalar>& c,
                                      const Var<Scalar>& anchor) {
  if (static_cast<Index>(s.size()) != anchor.rows())
    throw ShapeError("feature reconstruction: " + std::to_string(s.size()) +
                     " labels for " + std::to_string(anchor.rows()) +
                     " anchor frames");
  return Mse(fr(tape, s, c), anchor);
}

/// [0, mid) and [mid, n) with mid = ceil(n / 2).
inline std::pair<std::pair<Index, Index>, std::pair<Index, Index>>
SplitAnchorHalves(Index n) {
  if (n < 2)
    throw std::invalid_argument("split_anchor_halves: need >= 2 frames, got " +
                                std::to_string(n));
  const Index mid = (n + 1) / 2;
  return {{0, mid}, {mid, n}};
}

/// Linear-ReLU-Linear map from D to the expanded dimension.
template <typename Scalar>
struct Expander {
  Linear<Scalar> hidden;
  Linear<Scalar> out;

  Expander() = default;
  Expander(Index in, Index hid, Index dim, std::mt19937_64& rng)
      : hidden(in, hid, rng), out(hid, dim, rng) {}
  Expander(const ModelConfig& cfg, std::mt19937_64& rng)
      : Expander(cfg.context_dim, cfg.expander_hidden, cfg.expander_dim, rng) {}

  Var<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& x) {
    return out(tape, Relu(hidden(tape, x)));
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    hidden.VisitParams(prefix + ".hidden", f);
    out.VisitParams(prefix + ".out", f);
  }
};

/// v(Z): mean over dimensions of max(0, 1 - sqrt(Var(z_j) + eps)), with the
/// unbiased batch variance.
template <typename Scalar>
Var<Scalar> VarianceHinge(const Var<Scalar>& z, Scalar eps) {
  Var<Scalar> sd = Sqrt(AddScalar(VarianceRows(z), eps));
  return Mean(Relu(AddScalar(Scale(sd, Scalar(-1)), Scalar(1))));
}

/// c(Z): squared off-diagonal entries of the batch covariance, over dim.
template <typename Scalar>
Var<Scalar> CovariancePenalty(const Var<Scalar>& z) {
  const Index n = z.rows();
  Var<Scalar> centered = z - RepeatRow(MeanRows(z), n);
  Var<Scalar> cov =
      Scale(MatMul(Transpose(centered), centered), Scalar(1) / Scalar(n - 1));
  return Scale(OffDiagonalSquaredSum(cov), Scalar(1) / Scalar(z.cols()));
}

template <typename Scalar>
struct VicTerms {
  Var<Scalar> variance;    // v(Z) + v(Z')
  Var<Scalar> invariance;  // s(Z, Z')
  Var<Scalar> covariance;  // c(Z) + c(Z')
  Var<Scalar> total;
};

/// Weighted VIC loss on already expanded batches Z, Z' [N x dim].
template <typename Scalar>
VicTerms<Scalar> VicLossExpanded(const Var<Scalar>& z, const Var<Scalar>& zp,
                                 const LossWeights& w) {
  if (z.rows() < 2)
    throw std::invalid_argument("vic loss: batch of " + std::to_string(z.rows()) +
                                " < 2");
  if (z.shape() != zp.shape())
    throw ShapeError("vic loss: " + z.shape().ToString() + " vs " +
                     zp.shape().ToString());
  const Scalar eps = static_cast<Scalar>(w.variance_eps);
  VicTerms<Scalar> t;
  t.variance = VarianceHinge(z, eps) + VarianceHinge(zp, eps);
  t.invariance = Mse(z, zp);
  t.covariance = CovariancePenalty(z) + CovariancePenalty(zp);
  t.total = Scale(t.variance, Scalar(w.gamma)) +
            Scale(t.invariance, Scalar(w.mu)) +
            Scale(t.covariance, Scalar(w.nu));
  return t;
}

/// L_VIC for context embeddings C, C' [N x D] of the two anchor halves.
template <typename Scalar>
VicTerms<Scalar> VicLoss(Tape<Scalar>& tape, Expander<Scalar>& expander,
                         const Var<Scalar>& c, const Var<Scalar>& cp,
                         const LossWeights& w) {
  return VicLossExpanded(expander(tape, c), expander(tape, cp), w);
}

/// Combines the component losses according to `mode`. Components not used
/// by the mode may be invalid Vars.
template <typename Scalar>
Var<Scalar> TotalLoss(const Var<Scalar>& rnnt, const Var<Scalar>& vic,
                      const Var<Scalar>& fr, const LossWeights& w,
                      ObjectiveMode mode) {
  Var<Scalar> total = rnnt;
  if (UsesVic(mode)) total = total + vic;
  if (UsesFr(mode)) total = total + Scale(fr, Scalar(w.lambda_fr));
  return total;
}

}  // namespace anchored

#endif  // ANCHORED_AUX_OBJECTIVES_OBJECTIVES_HPP_
