// transducer/rnnt_loss.hpp

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

#ifndef ANCHORED_TRANSDUCER_RNNT_LOSS_HPP_
#define ANCHORED_TRANSDUCER_RNNT_LOSS_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "anchored/numerics/ops.hpp"
#include "anchored/transducer/networks.hpp"
#include "anchored/transducer/types.hpp"

namespace anchored {

namespace internal {

inline void CheckLatticeDims(Index frames, Index targets, Index labels,
                             Index rows, Index cols, const TokenSequence& y) {
  if (frames < 1) throw std::invalid_argument("rnnt loss: lattice has no frames");
  if (targets != y.size())
    throw ShapeError("rnnt loss: lattice target axis " + std::to_string(targets) +
                     " != transcript length " + std::to_string(y.size()));
  if (rows != frames * (targets + 1) || cols != labels)
    throw ShapeError("rnnt loss: logits " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " do not match T=" +
                     std::to_string(frames) + ", U=" + std::to_string(targets));
  for (int tok : y.tokens())
    if (tok >= labels)
      throw std::out_of_range("rnnt loss: token " + std::to_string(tok) +
                              " outside " + std::to_string(labels) + " labels");
}

}  // namespace internal

/// Forward-backward over the T x (U+1) alignment lattice.
///
/// alpha(t, u) is the log-probability of reaching node (t, u): from (t-1, u)
/// by emitting blank or from (t, u-1) by emitting y_u. The sequence
/// log-likelihood is alpha(T-1, U) plus the final blank. Returns the loss
/// -log P(y|x) and, when `grad` is non-null, d loss / d logits.
template <typename Scalar>
Scalar RnntForwardBackward(const Matrix<Scalar>& logits, Index frames,
                           Index targets, const TokenSequence& y,
                           Matrix<Scalar>* grad) {
  internal::CheckLatticeDims(frames, targets, logits.cols(), logits.rows(),
                             logits.cols(), y);
  constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
  const Index T = frames, U = targets, U1 = targets + 1;

  auto lse = internal::RowLogSumExp(logits);
  Matrix<Scalar> lp_blank(T, U1), lp_emit(T, U1);
  lp_emit.setConstant(kNegInf);
  for (Index t = 0; t < T; ++t) {
    for (Index u = 0; u < U1; ++u) {
      const Index r = t * U1 + u;
      lp_blank(t, u) = logits(r, kBlank) - lse(r);
      if (u < U) lp_emit(t, u) = logits(r, y[u]) - lse(r);
    }
  }

  Matrix<Scalar> alpha(T, U1);
  for (Index t = 0; t < T; ++t) {
    for (Index u = 0; u < U1; ++u) {
      if (t == 0 && u == 0) {
        alpha(0, 0) = 0;
        continue;
      }
      Scalar a = kNegInf;
      if (t > 0) a = alpha(t - 1, u) + lp_blank(t - 1, u);
      if (u > 0) a = LogAddExp(a, alpha(t, u - 1) + lp_emit(t, u - 1));
      alpha(t, u) = a;
    }
  }
  const Scalar log_like = alpha(T - 1, U) + lp_blank(T - 1, U);
  if (!std::isfinite(log_like))
    throw std::domain_error("rnnt loss: transcript has zero probability");

  if (grad) {
    Matrix<Scalar> beta(T, U1);
    for (Index t = T - 1; t >= 0; --t) {
      for (Index u = U; u >= 0; --u) {
        if (t == T - 1 && u == U) {
          beta(t, u) = lp_blank(t, u);
          continue;
        }
        Scalar b = kNegInf;
        if (t < T - 1) b = beta(t + 1, u) + lp_blank(t, u);
        if (u < U) b = LogAddExp(b, beta(t, u + 1) + lp_emit(t, u));
        beta(t, u) = b;
      }
    }
    grad->setZero(logits.rows(), logits.cols());
    for (Index t = 0; t < T; ++t) {
      for (Index u = 0; u < U1; ++u) {
        const Index r = t * U1 + u;
        // Occupancy of each outgoing arc, negated for the loss.
        Scalar g_blank = 0, g_emit = 0;
        if (t < T - 1)
          g_blank = -std::exp(alpha(t, u) + lp_blank(t, u) + beta(t + 1, u) -
                              log_like);
        else if (u == U)
          g_blank = -std::exp(alpha(t, u) + lp_blank(t, u) - log_like);
        if (u < U)
          g_emit = -std::exp(alpha(t, u) + lp_emit(t, u) + beta(t, u + 1) -
                             log_like);
        // Chain rule through the log-softmax of row r.
        const Scalar total = g_blank + g_emit;
        auto probs = (logits.row(r).array() - lse(r)).exp();
        grad->row(r) = -total * probs;
        (*grad)(r, kBlank) += g_blank;
        if (u < U) (*grad)(r, y[u]) += g_emit;
      }
    }
  }
  return -log_like;
}

/// Differentiable transducer loss -log P(y|x) for one lattice.
template <typename Scalar>
Var<Scalar> RnntLoss(const LogitLattice<Scalar>& lattice, const TokenSequence& y) {
  const Var<Scalar>& z = lattice.logits;
  Matrix<Scalar> grad;
  const bool want_grad = z.requires_grad();
  Matrix<Scalar> out(1, 1);
  out(0, 0) = RnntForwardBackward(z.value(), lattice.frames, lattice.targets, y,
                                  want_grad ? &grad : nullptr);
  return z.tape()->Record(Shape{}, std::move(out), {z},
                          [z, grad](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(z, grad * g(0, 0));
                          });
}

struct BruteforceResult {
  double loss = 0.0;
  std::int64_t paths = 0;
};

/// Reference loss by explicit enumeration of every monotonic lattice path.
/// A path makes T-1 blank moves and U emissions in some order, then the
/// final blank, so there are C(T-1+U, U) of them. Limited to T + U <= 12.
inline BruteforceResult RnntLossBruteforce(const Matrix<double>& logits,
                                           Index frames, Index targets,
                                           const TokenSequence& y) {
  internal::CheckLatticeDims(frames, targets, logits.cols(), logits.rows(),
                             logits.cols(), y);
  if (frames + targets > 12)
    throw std::invalid_argument("rnnt brute force: T + U = " +
                                std::to_string(frames + targets) + " > 12");
  const Index T = frames, U = targets, U1 = targets + 1;
  // Independent softmax in extended precision.
  auto prob = [&](Index t, Index u, Index label) {
    const Index r = t * U1 + u;
    long double mx = logits.row(r).maxCoeff(), z = 0;
    for (Index k = 0; k < logits.cols(); ++k)
      z += std::exp(static_cast<long double>(logits(r, k)) - mx);
    return std::exp(static_cast<long double>(logits(r, label)) - mx) / z;
  };

  const Index moves = T - 1 + U;
  BruteforceResult res;
  long double total = 0;
  for (std::uint32_t mask = 0; mask < (1u << moves); ++mask) {
    if (std::popcount(mask) != U) continue;
    Index t = 0, u = 0;
    long double p = 1;
    for (Index m = 0; m < moves; ++m) {
      if (mask & (1u << m)) {
        p *= prob(t, u, y[u]);
        ++u;
      } else {
        p *= prob(t, u, kBlank);
        ++t;
      }
    }
    p *= prob(T - 1, U, kBlank);
    total += p;
    ++res.paths;
  }
  res.loss = static_cast<double>(-std::log(total));
  return res;
}

}  // namespace anchored

#endif  // ANCHORED_TRANSDUCER_RNNT_LOSS_HPP_
