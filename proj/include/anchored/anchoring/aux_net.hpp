// anchoring/aux_net.hpp

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

#ifndef ANCHORED_ANCHORING_AUX_NET_HPP_
#define ANCHORED_ANCHORING_AUX_NET_HPP_

#include <random>
#include <string>
#include <vector>

#include "anchored/transducer/config.hpp"
#include "anchored/transducer/layers.hpp"
#include "anchored/transducer/types.hpp"

namespace anchored {

/// Groups `stack_factor` consecutive raw frames into one row so the
/// auxiliary network works at the encoder frame rate:
/// [T_raw x d] -> [floor(T_raw / stack) x stack * d].
template <typename Scalar>
Matrix<Scalar> StackRawFrames(const FeatureMatrix& raw, Index stack_factor) {
  const Index t = raw.rows() / stack_factor;
  Matrix<Scalar> top = raw.topRows(t * stack_factor).template cast<Scalar>();
  return top.template reshaped<Eigen::RowMajor>(t, stack_factor * raw.cols());
}

/// Zero-padded 1-D convolution over time: [n x in] -> [n x out].
template <typename Scalar>
struct TemporalConv {
  Linear<Scalar> taps;  // [kernel * in x out]
  Index kernel = 3;

  TemporalConv() = default;
  TemporalConv(Index in, Index out, Index k, std::mt19937_64& rng)
      : taps(k * in, out, rng), kernel(k) {}

  Var<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& x) {
    const Index n = x.rows(), c = x.cols(), half = kernel / 2;
    Var<Scalar> cols;
    for (Index o = -half; o <= half; ++o) {
      // Row i of `shifted` holds x[i + o], zero outside [0, n).
      Var<Scalar> shifted;
      if (o == 0) {
        shifted = x;
      } else {
        const Index keep = std::max<Index>(0, n - std::abs(o));
        const Index pad = n - keep;
        Var<Scalar> zeros = tape.Constant(Matrix<Scalar>::Zero(pad, c));
        if (keep == 0) {
          shifted = zeros;
        } else if (o > 0) {
          shifted = ConcatRows<Scalar>({SliceRows(x, o, n), zeros});
        } else {
          shifted = ConcatRows<Scalar>({zeros, SliceRows(x, 0, keep)});
        }
      }
      cols = cols.valid() ? ConcatCols(cols, shifted) : shifted;
    }
    return taps(tape, cols);
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    taps.VisitParams(prefix, f);
  }
};

/// The small network that summarises a stretch of frames into a
/// D-dimensional embedding: two convolutional layers, mean pooling over
/// time, and a linear map. The same weights produce the anchor context c
/// and the per-block embeddings h_t.
template <typename Scalar>
struct AuxNet {
  TemporalConv<Scalar> conv1;
  TemporalConv<Scalar> conv2;
  Linear<Scalar> proj;

  AuxNet() = default;
  AuxNet(const ModelConfig& cfg, std::mt19937_64& rng)
      : conv1(cfg.stack_factor * cfg.d_raw, cfg.aux_hidden, cfg.aux_kernel, rng),
        conv2(cfg.aux_hidden, cfg.aux_hidden, cfg.aux_kernel, rng),
        proj(cfg.aux_hidden, cfg.context_dim, rng) {}

  /// [n x stack*d_raw] -> [1 x D].
  Var<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& frames) {
    if (frames.rows() < 1)
      throw std::invalid_argument("aux net: empty segment");
    Var<Scalar> h = Relu(conv1(tape, frames));
    h = Relu(conv2(tape, h));
    return proj(tape, MeanRows(h));
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    conv1.VisitParams(prefix + ".conv1", f);
    conv2.VisitParams(prefix + ".conv2", f);
    proj.VisitParams(prefix + ".proj", f);
  }
};

}  // namespace anchored

#endif  // ANCHORED_ANCHORING_AUX_NET_HPP_
