// baselines/anchor_mean.hpp

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

#ifndef ANCHORED_BASELINES_ANCHOR_MEAN_HPP_
#define ANCHORED_BASELINES_ANCHOR_MEAN_HPP_

#include <random>
#include <string>

#include "anchored/transducer/config.hpp"
#include "anchored/transducer/layers.hpp"
#include "anchored/transducer/types.hpp"

namespace anchored {

/// Per-dimension mean of the anchor frames.
inline RowVector<double> AnchorMean(const FeatureMatrix& anchor) {
  if (anchor.rows() < 1) throw std::invalid_argument("anchor_mean: empty anchor");
  return anchor.colwise().mean();
}

/// Subtracts `mean` from every frame.
inline FeatureMatrix ApplyAms(const FeatureMatrix& frames,
                              const RowVector<double>& mean) {
  if (frames.cols() != mean.cols())
    throw ShapeError("apply_ams: frames have " + std::to_string(frames.cols()) +
                     " dims, mean has " + std::to_string(mean.cols()));
  return frames.rowwise() - mean;
}

template <typename Scalar>
Var<Scalar> ApplyAms(const Var<Scalar>& frames, const Var<Scalar>& mean) {
  if (mean.rows() != 1 || frames.cols() != mean.cols())
    throw ShapeError("apply_ams: frames " + frames.shape().ToString() +
                     " vs mean " + mean.shape().ToString());
  return frames - RepeatRow(mean, frames.rows());
}

/// Affine map of [frame, mean] back to the frame width: W is [2d x d].
/// Starts as the identity on frames (W = [I; 0], zero bias).
template <typename Scalar>
struct AmcTransform {
  Linear<Scalar> affine;

  AmcTransform() = default;
  explicit AmcTransform(Index d_raw) {
    std::mt19937_64 unused(0);
    affine = Linear<Scalar>(2 * d_raw, d_raw, unused);
    affine.weight.data().setZero();
    affine.weight.data().topRows(d_raw).setIdentity();
  }

  Index dim() const { return affine.out_dim(); }

  Var<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& frames,
                         const Var<Scalar>& mean) {
    if (mean.rows() != 1 || frames.cols() != dim() || mean.cols() != dim())
      throw ShapeError("apply_amc: frames " + frames.shape().ToString() +
                       ", mean " + mean.shape().ToString() + ", W [" +
                       std::to_string(affine.in_dim()) + " x " +
                       std::to_string(affine.out_dim()) + "]");
    return affine(tape, ConcatCols(frames, RepeatRow(mean, frames.rows())));
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    affine.VisitParams(prefix, f);
  }
};

}  // namespace anchored

#endif  // ANCHORED_BASELINES_ANCHOR_MEAN_HPP_
