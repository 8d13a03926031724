// transducer/layers.hpp

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

// Parameterised building blocks shared by every network in the model. Each
// block owns its tensors and exposes them through VisitParams so that
// checkpointing, optimisation and precision casts see one ordered list.

#ifndef ANCHORED_TRANSDUCER_LAYERS_HPP_
#define ANCHORED_TRANSDUCER_LAYERS_HPP_

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "anchored/numerics/ops.hpp"

namespace anchored {

template <typename Scalar>
Tensor<Scalar> UniformParam(Shape shape, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Matrix<Scalar> m(shape.rows(), shape.cols());
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(u(rng));
  Tensor<Scalar> t(std::move(shape), std::move(m));
  t.set_requires_grad(true);
  return t;
}

template <typename Scalar>
Tensor<Scalar> ConstantParam(Shape shape, Scalar value) {
  Tensor<Scalar> t(shape, Matrix<Scalar>::Constant(shape.rows(), shape.cols(), value));
  t.set_requires_grad(true);
  return t;
}

/// y = x W + b with W stored as [in x out].
template <typename Scalar>
struct Linear {
  Tensor<Scalar> weight;
  Tensor<Scalar> bias;
  bool has_bias = true;

  Linear() = default;
  Linear(Index in, Index out, std::mt19937_64& rng, bool with_bias = true)
      : weight(UniformParam<Scalar>(Shape{in, out}, 1.0 / std::sqrt(double(in)), rng)),
        bias(ConstantParam<Scalar>(Shape{1, out}, Scalar(0))),
        has_bias(with_bias) {}

  Index in_dim() const { return weight.shape()[0]; }
  Index out_dim() const { return weight.shape()[1]; }

  Var<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& x) {
    Var<Scalar> y = MatMul(x, tape.Leaf(weight));
    return has_bias ? AddRow(y, tape.Leaf(bias)) : y;
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    f(prefix + ".weight", weight);
    if (has_bias) f(prefix + ".bias", bias);
  }
};

template <typename Scalar>
struct LayerNormLayer {
  Tensor<Scalar> gain;
  Tensor<Scalar> bias;

  LayerNormLayer() = default;
  explicit LayerNormLayer(Index dim)
      : gain(ConstantParam<Scalar>(Shape{1, dim}, Scalar(1))),
        bias(ConstantParam<Scalar>(Shape{1, dim}, Scalar(0))) {}

  Var<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& x) {
    return LayerNorm(x, tape.Leaf(gain), tape.Leaf(bias));
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    f(prefix + ".gain", gain);
    f(prefix + ".bias", bias);
  }
};

template <typename Scalar>
struct Embedding {
  Tensor<Scalar> table;

  Embedding() = default;
  Embedding(Index rows, Index dim, std::mt19937_64& rng)
      : table(UniformParam<Scalar>(Shape{rows, dim}, 1.0, rng)) {}

  Var<Scalar> operator()(Tape<Scalar>& tape, const std::vector<Index>& ids) {
    return GatherRows(tape.Leaf(table), ids);
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    f(prefix + ".table", table);
  }
};

/// Gated recurrent unit (reset gate applied after the hidden projection).
/// Gate blocks in the packed weights are ordered [reset, update, candidate].
template <typename Scalar>
struct Gru {
  Linear<Scalar> input;   // [in x 3h]
  Linear<Scalar> hidden;  // [h x 3h]

  Gru() = default;
  Gru(Index in, Index hid, std::mt19937_64& rng)
      : input(in, 3 * hid, rng), hidden(hid, 3 * hid, rng) {}

  Index hidden_dim() const { return hidden.in_dim(); }

  /// Parameters bound to one tape; bind once per sequence.
  struct Bound {
    Var<Scalar> wi, bi, wh, bh;
  };
  Bound Bind(Tape<Scalar>& tape) {
    return {tape.Leaf(input.weight), tape.Leaf(input.bias),
            tape.Leaf(hidden.weight), tape.Leaf(hidden.bias)};
  }

  Var<Scalar> InitialState(Tape<Scalar>& tape) const {
    return tape.Constant(Matrix<Scalar>::Zero(1, hidden_dim()));
  }

  /// One step given the already projected input row x W_i + b_i.
  static Var<Scalar> Step(const Bound& p, const Var<Scalar>& xproj,
                          const Var<Scalar>& h) {
    const Index n = h.cols();
    Var<Scalar> hproj = AddRow(MatMul(h, p.wh), p.bh);
    Var<Scalar> r = Sigmoid(SliceCols(xproj, 0, n) + SliceCols(hproj, 0, n));
    Var<Scalar> z =
        Sigmoid(SliceCols(xproj, n, 2 * n) + SliceCols(hproj, n, 2 * n));
    Var<Scalar> cand = Tanh(SliceCols(xproj, 2 * n, 3 * n) +
                            Mul(r, SliceCols(hproj, 2 * n, 3 * n)));
    // h' = cand + z * (h - cand)
    return cand + Mul(z, h - cand);
  }

  /// Runs over every row of `x` from a zero state.
  Var<Scalar> operator()(Tape<Scalar>& tape, const Var<Scalar>& x) {
    Bound p = Bind(tape);
    Var<Scalar> xproj = AddRow(MatMul(x, p.wi), p.bi);
    Var<Scalar> h = InitialState(tape);
    std::vector<Var<Scalar>> outs;
    outs.reserve(static_cast<size_t>(x.rows()));
    for (Index t = 0; t < x.rows(); ++t) {
      h = Step(p, Row(xproj, t), h);
      outs.push_back(h);
    }
    return ConcatRows(outs);
  }

  template <typename F>
  void VisitParams(const std::string& prefix, F&& f) {
    input.VisitParams(prefix + ".input", f);
    hidden.VisitParams(prefix + ".hidden", f);
  }
};

}  // namespace anchored

#endif  // ANCHORED_TRANSDUCER_LAYERS_HPP_
