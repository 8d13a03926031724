// transducer/decoder.hpp

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

#ifndef ANCHORED_TRANSDUCER_DECODER_HPP_
#define ANCHORED_TRANSDUCER_DECODER_HPP_

#include <vector>

#include "anchored/transducer/networks.hpp"
#include "anchored/transducer/types.hpp"

namespace anchored {

inline constexpr int kMaxSymbolsPerFrame = 4;

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
Index ArgMaxLowest(const Eigen::DenseBase<Derived>& row) {
  Index best = 0;
  for (Index k = 1; k < row.size(); ++k)
    if (row(k) > row(best)) best = k;
  return best;
}

/// Frame-synchronous greedy search. At each encoder frame, emits the argmax
/// label until blank wins or `max_symbols` labels were emitted, then moves
/// to the next frame. When `gate` is non-null, gate[t] is added to every
/// non-blank logit and 1 - gate[t] to blank before the argmax.
template <typename Scalar>
TokenSequence GreedyDecode(Tape<Scalar>& tape, Predictor<Scalar>& predictor,
                           Joiner<Scalar>& joiner, const Var<Scalar>& f,
                           const std::vector<Scalar>* gate = nullptr,
                           int max_symbols = kMaxSymbolsPerFrame) {
  if (gate && static_cast<Index>(gate->size()) != f.rows())
    throw ShapeError("greedy decode: " + std::to_string(gate->size()) +
                     " gate values for " + std::to_string(f.rows()) + " frames");
  Var<Scalar> pf = joiner.proj_f(tape, f);
  auto state = predictor.InitialState(tape);
  Var<Scalar> g = predictor.Step(tape, state, kBlank);
  std::vector<int> out;
  for (Index t = 0; t < f.rows(); ++t) {
    Var<Scalar> pf_t = Row(pf, t);
    for (int n = 0; n < max_symbols; ++n) {
      RowVector<Scalar> z = joiner.Single(tape, pf_t, g).value().row(0);
      if (gate) {
        const Scalar b = (*gate)[static_cast<size_t>(t)];
        z(kBlank) += Scalar(1) - b;
        z.tail(z.size() - 1).array() += b;
      }
      const Index k = ArgMaxLowest(z);
      if (k == kBlank) break;
      out.push_back(static_cast<int>(k));
      g = predictor.Step(tape, state, static_cast<int>(k));
    }
  }
  return TokenSequence(std::move(out));
}

}  // namespace anchored

#endif  // ANCHORED_TRANSDUCER_DECODER_HPP_
