// anchoring/gating.hpp

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

// Context biasing of the transducer: the encoder-input projection and the
// joiner gate.

#ifndef ANCHORED_ANCHORING_GATING_HPP_
#define ANCHORED_ANCHORING_GATING_HPP_

#include <algorithm>
#include <atomic>
#include <iostream>
#include <vector>

#include "anchored/anchoring/aux_net.hpp"
#include "anchored/transducer/networks.hpp"

namespace anchored {

/// Smallest and largest possible gate values, sigmoid(-1) and sigmoid(1).
inline constexpr double kGateMin = 0.2689414213699951;
inline constexpr double kGateMax = 0.7310585786300049;

/// Counts gate evaluations where c or h had zero norm.
inline std::atomic<long>& DegenerateGateCount() {
  static std::atomic<long> count{0};
  return count;
}

/// x'_t = ReLU([x_t, c] W_proj), the same c appended to every frame.
/// W_proj is [(d_model + D) x d_model].
template <typename Scalar>
Var<Scalar> BiasEncoderInputs(Tape<Scalar>& tape, const Var<Scalar>& stacked,
                              const Var<Scalar>& c, Linear<Scalar>& w_proj) {
  if (c.rows() != 1)
    throw ShapeError("bias_encoder_inputs: context must be one row, got " +
                     c.shape().ToString());
  if (w_proj.in_dim() != stacked.cols() + c.cols() ||
      w_proj.out_dim() != stacked.cols())
    throw ShapeError("bias_encoder_inputs: W_proj [" +
                     std::to_string(w_proj.in_dim()) + " x " +
                     std::to_string(w_proj.out_dim()) + "] for frames of width " +
                     std::to_string(stacked.cols()) + " and context of width " +
                     std::to_string(c.cols()));
  return Relu(w_proj(tape, ConcatCols(stacked, RepeatRow(c, stacked.rows()))));
}

/// b = sigmoid(cos(c, h)). A zero-norm side gives cos = 0, hence b = 0.5.
template <typename Scalar>
Var<Scalar> GateBias(const Var<Scalar>& c, const Var<Scalar>& h) {
  Var<Scalar> cos = CosineSimilarity(c, h);
  if (c.value().norm() == Scalar(0) || h.value().norm() == Scalar(0)) {
    if (DegenerateGateCount()++ == 0)
      std::clog << "warning: zero-norm embedding in joiner gate; using b = 0.5\n";
  }
  return Sigmoid(cos);
}

/// One embedding per block of `block` encoder frames, each computed from the
/// block widened by the configured left/right context and clipped to the
/// utterance.
template <typename Scalar>
struct Subsegment {
  Index begin = 0;  // first encoder frame of the block
  Index end = 0;    // one past the last
  Index window_begin = 0;
  Index window_end = 0;
  Var<Scalar> embedding;
};

inline std::vector<std::pair<Index, Index>> SubsegmentBlocks(
    Index frames, const SubsegmentConfig& cfg) {
  cfg.Validate();
  std::vector<std::pair<Index, Index>> blocks;
  for (Index b = 0; b < frames; b += cfg.block)
    blocks.emplace_back(b, std::min(frames, b + cfg.block));
  return blocks;
}

template <typename Scalar>
std::vector<Subsegment<Scalar>> SubsegmentEmbeddings(
    Tape<Scalar>& tape, AuxNet<Scalar>& aux, const Var<Scalar>& frames,
    const SubsegmentConfig& cfg) {
  const Index n = frames.rows();
  if (n < 1) throw std::invalid_argument("subsegment_embeddings: no frames");
  std::vector<Subsegment<Scalar>> out;
  for (auto [b, e] : SubsegmentBlocks(n, cfg)) {
    Subsegment<Scalar> s;
    s.begin = b;
    s.end = e;
    s.window_begin = std::max<Index>(0, b - cfg.left_ctx);
    s.window_end = std::min(n, e + cfg.right_ctx);
    s.embedding = aux(tape, SliceRows(frames, s.window_begin, s.window_end));
    out.push_back(std::move(s));
  }
  return out;
}

/// Per-encoder-frame gate values [T x 1]; frames in one block share a value.
template <typename Scalar>
Var<Scalar> FrameGateBias(const Var<Scalar>& c,
                          const std::vector<Subsegment<Scalar>>& segments) {
  std::vector<Var<Scalar>> parts;
  for (const auto& s : segments)
    parts.push_back(RepeatRow(Reshape(GateBias(c, s.embedding), Shape{1, 1}),
                              s.end - s.begin));
  return ConcatRows(parts);
}

/// Adds (1 - b_t) to the blank logit and b_t to every other logit of each
/// lattice node at frame t.
template <typename Scalar>
LogitLattice<Scalar> ApplyJoinerGating(const LogitLattice<Scalar>& lattice,
                                       const Var<Scalar>& gate) {
  if (gate.numel() != lattice.frames)
    throw ShapeError("apply_joiner_gating: " + std::to_string(gate.numel()) +
                     " gate values for " + std::to_string(lattice.frames) +
                     " frames");
  const Index u1 = lattice.targets + 1;
  const Var<Scalar>& z = lattice.logits;
  Matrix<Scalar> out = z.value();
  for (Index t = 0; t < lattice.frames; ++t) {
    const Scalar b = gate.value().data()[t];
    auto blk = out.middleRows(t * u1, u1);
    blk.col(kBlank).array() += Scalar(1) - b;
    blk.rightCols(blk.cols() - 1).array() += b;
  }
  const Index frames = lattice.frames;
  LogitLattice<Scalar> gated = lattice;
  gated.logits = z.tape()->Record(
      z.shape(), std::move(out), {z, gate},
      [z, gate, frames, u1](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        t.Accumulate(z, g);
        if (gate.requires_grad()) {
          Matrix<Scalar> gb(gate.rows(), gate.cols());
          for (Index f = 0; f < frames; ++f) {
            auto blk = g.middleRows(f * u1, u1);
            gb.data()[f] = blk.sum() - Scalar(2) * blk.col(kBlank).sum();
          }
          t.Accumulate(gate, gb);
        }
      });
  return gated;
}

}  // namespace anchored

#endif  // ANCHORED_ANCHORING_GATING_HPP_
