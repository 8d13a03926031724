// numerics/ops.hpp

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

// Differentiable primitives. Every function evaluates eagerly and records
// itself on the tape of its first operand. Tensors are viewed as
// (leading axes folded) x (last axis) matrices; the only implicit
// broadcasting is a row vector repeated over the leading axis.

#ifndef ANCHORED_NUMERICS_OPS_HPP_
#define ANCHORED_NUMERICS_OPS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "anchored/numerics/tape.hpp"

namespace anchored {

namespace internal {

template <typename Scalar>
void RequireSameShape(const Var<Scalar>& a, const Var<Scalar>& b,
                      const char* op) {
  if (a.tape() != b.tape())
    throw std::invalid_argument(std::string(op) + ": operands on different tapes");
  if (!(a.shape() == b.shape()))
    throw ShapeError(std::string(op) + ": lhs shape " + a.shape().ToString() +
                     " != rhs shape " + b.shape().ToString());
}

template <typename Scalar>
Shape WithLastDim(const Shape& s, Index last) {
  std::vector<Index> d = s.dims();
  if (d.empty()) return Shape{last};
  d.back() = last;
  return Shape(std::move(d));
}

/// Numerically stable log(sum(exp(row))) for every row.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> RowLogSumExp(
    const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  Eigen::Matrix<S, Eigen::Dynamic, 1> out(m.rows());
  for (Index r = 0; r < m.rows(); ++r) {
    S mx = m.row(r).maxCoeff();
    if (!std::isfinite(mx)) {
      out(r) = mx;
      continue;
    }
    out(r) = mx + std::log((m.row(r).array() - mx).exp().sum());
  }
  return out;
}

}  // namespace internal

/// Stable log(exp(a) + exp(b)) with -inf handling.
template <typename Scalar>
Scalar LogAddExp(Scalar a, Scalar b) {
  constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// ---------------------------------------------------------------------------
// Linear algebra

/// a: [... x k], b: [k x n] -> [... x n].
template <typename Scalar>
Var<Scalar> MatMul(const Var<Scalar>& a, const Var<Scalar>& b) {
  if (b.shape().rank() != 2)
    throw ShapeError("MatMul: rhs must be rank 2, got " + b.shape().ToString());
  if (a.cols() != b.rows())
    throw ShapeError("MatMul: inner dimension lhs.cols=" +
                     std::to_string(a.cols()) +
                     " != rhs.rows=" + std::to_string(b.rows()));
  Matrix<Scalar> out = a.value() * b.value();
  return a.tape()->Record(
      internal::WithLastDim<Scalar>(a.shape(), b.cols()), std::move(out),
      {a, b}, [a, b](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        if (a.requires_grad()) t.Accumulate(a, g * b.value().transpose());
        if (b.requires_grad()) t.Accumulate(b, a.value().transpose() * g);
      });
}

template <typename Scalar>
Var<Scalar> Transpose(const Var<Scalar>& a) {
  if (a.shape().rank() != 2)
    throw ShapeError("Transpose: expected rank 2, got " + a.shape().ToString());
  Matrix<Scalar> out = a.value().transpose();
  return a.tape()->Record(Shape{a.cols(), a.rows()}, std::move(out), {a},
                          [a](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(a, g.transpose());
                          });
}

// ---------------------------------------------------------------------------
// Elementwise binary

template <typename Scalar>
Var<Scalar> Add(const Var<Scalar>& a, const Var<Scalar>& b) {
  internal::RequireSameShape(a, b, "Add");
  Matrix<Scalar> out = a.value() + b.value();
  return a.tape()->Record(a.shape(), std::move(out), {a, b},
                          [a, b](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(a, g);
                            t.Accumulate(b, g);
                          });
}

template <typename Scalar>
Var<Scalar> Sub(const Var<Scalar>& a, const Var<Scalar>& b) {
  internal::RequireSameShape(a, b, "Sub");
  Matrix<Scalar> out = a.value() - b.value();
  return a.tape()->Record(a.shape(), std::move(out), {a, b},
                          [a, b](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(a, g);
                            t.Accumulate(b, -g);
                          });
}

/// Hadamard product.
template <typename Scalar>
Var<Scalar> Mul(const Var<Scalar>& a, const Var<Scalar>& b) {
  internal::RequireSameShape(a, b, "Mul");
  Matrix<Scalar> out = a.value().cwiseProduct(b.value());
  return a.tape()->Record(
      a.shape(), std::move(out), {a, b},
      [a, b](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        if (a.requires_grad()) t.Accumulate(a, g.cwiseProduct(b.value()));
        if (b.requires_grad()) t.Accumulate(b, g.cwiseProduct(a.value()));
      });
}

template <typename Scalar>
Var<Scalar> operator+(const Var<Scalar>& a, const Var<Scalar>& b) {
  return Add(a, b);
}
template <typename Scalar>
Var<Scalar> operator-(const Var<Scalar>& a, const Var<Scalar>& b) {
  return Sub(a, b);
}

namespace internal {
template <typename Scalar>
void RequireRowOperand(const Var<Scalar>& a, const Var<Scalar>& row,
                       const char* op) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw ShapeError(std::string(op) + ": row operand " + row.shape().ToString() +
                     " does not match last axis " + std::to_string(a.cols()) +
                     " of " + a.shape().ToString());
}
}  // namespace internal

/// a + row, with `row` repeated over every leading index.
template <typename Scalar>
Var<Scalar> AddRow(const Var<Scalar>& a, const Var<Scalar>& row) {
  internal::RequireRowOperand(a, row, "AddRow");
  Matrix<Scalar> out = a.value().rowwise() + row.value().row(0);
  return a.tape()->Record(
      a.shape(), std::move(out), {a, row},
      [a, row](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        t.Accumulate(a, g);
        if (row.requires_grad()) t.Accumulate(row, g.colwise().sum());
      });
}

/// a * row elementwise, with `row` repeated over every leading index.
template <typename Scalar>
Var<Scalar> MulRow(const Var<Scalar>& a, const Var<Scalar>& row) {
  internal::RequireRowOperand(a, row, "MulRow");
  Matrix<Scalar> out =
      a.value().array().rowwise() * row.value().row(0).array();
  return a.tape()->Record(
      a.shape(), std::move(out), {a, row},
      [a, row](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        if (a.requires_grad()) {
          Matrix<Scalar> ga = g.array().rowwise() * row.value().row(0).array();
          t.Accumulate(a, ga);
        }
        if (row.requires_grad())
          t.Accumulate(row, g.cwiseProduct(a.value()).colwise().sum());
      });
}

/// Repeats a single row `n` times along a new leading axis: [1 x c] -> [n x c].
template <typename Scalar>
Var<Scalar> RepeatRow(const Var<Scalar>& row, Index n) {
  if (row.rows() != 1)
    throw ShapeError("RepeatRow: expected a single row, got " + row.shape().ToString());
  Matrix<Scalar> out = row.value().replicate(n, 1);
  return row.tape()->Record(Shape{n, row.cols()}, std::move(out), {row},
                            [row](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                              t.Accumulate(row, g.colwise().sum());
                            });
}

template <typename Scalar>
Var<Scalar> Scale(const Var<Scalar>& a, Scalar s) {
  Matrix<Scalar> out = a.value() * s;
  return a.tape()->Record(a.shape(), std::move(out), {a},
                          [a, s](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(a, g * s);
                          });
}

template <typename Scalar>
Var<Scalar> AddScalar(const Var<Scalar>& a, Scalar s) {
  Matrix<Scalar> out = a.value().array() + s;
  return a.tape()->Record(a.shape(), std::move(out), {a},
                          [a](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(a, g);
                          });
}

// ---------------------------------------------------------------------------
// Elementwise unary

template <typename Scalar>
Var<Scalar> Relu(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().cwiseMax(Scalar(0));
  return a.tape()->Record(
      a.shape(), std::move(out), {a},
      [a](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> ga =
            (a.value().array() > Scalar(0)).select(g, Scalar(0));
        t.Accumulate(a, ga);
      });
}

template <typename Scalar>
Scalar SigmoidScalar(Scalar x) {
  if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
  Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
Var<Scalar> Sigmoid(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().unaryExpr(&SigmoidScalar<Scalar>);
  Matrix<Scalar> saved = out;
  return a.tape()->Record(
      a.shape(), std::move(out), {a},
      [a, saved](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> ga =
            g.array() * saved.array() * (Scalar(1) - saved.array());
        t.Accumulate(a, ga);
      });
}

template <typename Scalar>
Var<Scalar> Tanh(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().array().tanh();
  Matrix<Scalar> saved = out;
  return a.tape()->Record(
      a.shape(), std::move(out), {a},
      [a, saved](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> ga = g.array() * (Scalar(1) - saved.array().square());
        t.Accumulate(a, ga);
      });
}

template <typename Scalar>
Var<Scalar> Exp(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().array().exp();
  Matrix<Scalar> saved = out;
  return a.tape()->Record(a.shape(), std::move(out), {a},
                          [a, saved](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(a, g.cwiseProduct(saved));
                          });
}

template <typename Scalar>
Var<Scalar> Log(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().array().log();
  return a.tape()->Record(a.shape(), std::move(out), {a},
                          [a](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(a, g.cwiseQuotient(a.value()));
                          });
}

template <typename Scalar>
Var<Scalar> Sqrt(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().array().sqrt();
  Matrix<Scalar> saved = out;
  return a.tape()->Record(
      a.shape(), std::move(out), {a},
      [a, saved](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> ga = g.array() / (Scalar(2) * saved.array());
        t.Accumulate(a, ga);
      });
}

template <typename Scalar>
Var<Scalar> Square(const Var<Scalar>& a) {
  Matrix<Scalar> out = a.value().array().square();
  return a.tape()->Record(a.shape(), std::move(out), {a},
                          [a](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(a, Scalar(2) * g.cwiseProduct(a.value()));
                          });
}

// ---------------------------------------------------------------------------
// Normalisation over the last axis

template <typename Scalar>
Var<Scalar> Softmax(const Var<Scalar>& a) {
  auto lse = internal::RowLogSumExp(a.value());
  Matrix<Scalar> out = (a.value().colwise() - lse).array().exp();
  Matrix<Scalar> saved = out;
  return a.tape()->Record(
      a.shape(), std::move(out), {a},
      [a, saved](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dot =
            g.cwiseProduct(saved).rowwise().sum();
        Matrix<Scalar> ga = saved.cwiseProduct(g - dot.replicate(1, g.cols()));
        t.Accumulate(a, ga);
      });
}

template <typename Scalar>
Var<Scalar> LogSoftmax(const Var<Scalar>& a) {
  auto lse = internal::RowLogSumExp(a.value());
  Matrix<Scalar> out = a.value().colwise() - lse;
  Matrix<Scalar> probs = out.array().exp();
  return a.tape()->Record(
      a.shape(), std::move(out), {a},
      [a, probs](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> total = g.rowwise().sum();
        Matrix<Scalar> ga = g - probs.cwiseProduct(total.replicate(1, g.cols()));
        t.Accumulate(a, ga);
      });
}

/// Per-row layer normalisation with learned gain and bias rows (biased
/// variance, as is conventional).
template <typename Scalar>
Var<Scalar> LayerNorm(const Var<Scalar>& a, const Var<Scalar>& gain,
                      const Var<Scalar>& bias, Scalar eps = Scalar(1e-5)) {
  internal::RequireRowOperand(a, gain, "LayerNorm(gain)");
  internal::RequireRowOperand(a, bias, "LayerNorm(bias)");
  const Index n = a.cols();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean = a.value().rowwise().mean();
  Matrix<Scalar> centered = a.value().colwise() - mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv_std =
      ((centered.array().square().rowwise().sum() / Scalar(n)) + eps)
          .rsqrt();
  Matrix<Scalar> xhat = centered.array().colwise() * inv_std.array();
  Matrix<Scalar> out =
      (xhat.array().rowwise() * gain.value().row(0).array()).rowwise() +
      bias.value().row(0).array();
  return a.tape()->Record(
      a.shape(), std::move(out), {a, gain, bias},
      [a, gain, bias, xhat, inv_std, n](Tape<Scalar>& t,
                                        const Matrix<Scalar>& g) {
        if (gain.requires_grad())
          t.Accumulate(gain, g.cwiseProduct(xhat).colwise().sum());
        if (bias.requires_grad()) t.Accumulate(bias, g.colwise().sum());
        if (a.requires_grad()) {
          Matrix<Scalar> dxhat =
              g.array().rowwise() * gain.value().row(0).array();
          Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m1 = dxhat.rowwise().mean();
          Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m2 =
              dxhat.cwiseProduct(xhat).rowwise().mean();
          Matrix<Scalar> ga =
              ((dxhat.colwise() - m1).array() -
               xhat.array().colwise() * m2.array())
                  .colwise() *
              inv_std.array();
          t.Accumulate(a, ga);
        }
      });
}

// ---------------------------------------------------------------------------
// Reductions

template <typename Scalar>
Var<Scalar> Sum(const Var<Scalar>& a) {
  Matrix<Scalar> out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape()->Record(
      Shape{}, std::move(out), {a},
      [a](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        t.Accumulate(a, Matrix<Scalar>::Constant(a.rows(), a.cols(), g(0, 0)));
      });
}

template <typename Scalar>
Var<Scalar> Mean(const Var<Scalar>& a) {
  if (a.numel() == 0) throw ShapeError("Mean: empty tensor");
  return Scale(Sum(a), Scalar(1) / Scalar(a.numel()));
}

/// Mean over the leading axis: [n x c] -> [1 x c].
template <typename Scalar>
Var<Scalar> MeanRows(const Var<Scalar>& a) {
  if (a.rows() == 0) throw ShapeError("MeanRows: no rows");
  const Index n = a.rows();
  Matrix<Scalar> out = a.value().colwise().mean();
  return a.tape()->Record(
      Shape{1, a.cols()}, std::move(out), {a},
      [a, n](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        t.Accumulate(a, (g / Scalar(n)).replicate(n, 1));
      });
}

/// Unbiased (n - 1) sample variance of each column: [n x c] -> [1 x c].
template <typename Scalar>
Var<Scalar> VarianceRows(const Var<Scalar>& a) {
  const Index n = a.rows();
  if (n < 2) throw ShapeError("VarianceRows: need at least 2 rows, got " +
                              std::to_string(n));
  RowVector<Scalar> mean = a.value().colwise().mean();
  Matrix<Scalar> centered = a.value().rowwise() - mean;
  Matrix<Scalar> out =
      centered.array().square().colwise().sum() / Scalar(n - 1);
  return a.tape()->Record(
      Shape{1, a.cols()}, std::move(out), {a},
      [a, centered, n](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> ga = (centered.array().rowwise() * g.row(0).array()) *
                            (Scalar(2) / Scalar(n - 1));
        t.Accumulate(a, ga);
      });
}

/// Mean squared difference over all elements.
template <typename Scalar>
Var<Scalar> Mse(const Var<Scalar>& a, const Var<Scalar>& b) {
  internal::RequireSameShape(a, b, "Mse");
  return Mean(Square(Sub(a, b)));
}

/// Cosine of the angle between two equally sized tensors, flattened. A zero
/// norm on either side yields 0 with zero gradient.
template <typename Scalar>
Var<Scalar> CosineSimilarity(const Var<Scalar>& a, const Var<Scalar>& b) {
  internal::RequireSameShape(a, b, "CosineSimilarity");
  const Scalar na = a.value().norm();
  const Scalar nb = b.value().norm();
  Matrix<Scalar> out(1, 1);
  const bool degenerate = na == Scalar(0) || nb == Scalar(0);
  const Scalar dot = a.value().cwiseProduct(b.value()).sum();
  out(0, 0) = degenerate ? Scalar(0) : dot / (na * nb);
  const Scalar cos = out(0, 0);
  return a.tape()->Record(
      Shape{}, std::move(out), {a, b},
      [a, b, na, nb, cos, degenerate](Tape<Scalar>& t,
                                      const Matrix<Scalar>& g) {
        if (degenerate) return;
        const Scalar s = g(0, 0);
        if (a.requires_grad())
          t.Accumulate(a, s * (b.value() / (na * nb) -
                               a.value() * (cos / (na * na))));
        if (b.requires_grad())
          t.Accumulate(b, s * (a.value() / (na * nb) -
                               b.value() * (cos / (nb * nb))));
      });
}

/// Sum of squared off-diagonal entries of a square matrix.
template <typename Scalar>
Var<Scalar> OffDiagonalSquaredSum(const Var<Scalar>& a) {
  if (a.shape().rank() != 2 || a.rows() != a.cols())
    throw ShapeError("OffDiagonalSquaredSum: expected square matrix, got " +
                     a.shape().ToString());
  Matrix<Scalar> off = a.value();
  off.diagonal().setZero();
  Matrix<Scalar> out(1, 1);
  out(0, 0) = off.squaredNorm();
  return a.tape()->Record(Shape{}, std::move(out), {a},
                          [a, off](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                            t.Accumulate(a, Scalar(2) * g(0, 0) * off);
                          });
}

// ---------------------------------------------------------------------------
// Structural

/// Concatenation along the last axis. Leading shapes must agree.
template <typename Scalar>
Var<Scalar> ConcatCols(const Var<Scalar>& a, const Var<Scalar>& b) {
  if (a.rows() != b.rows())
    throw ShapeError("ConcatCols: leading size " + std::to_string(a.rows()) +
                     " != " + std::to_string(b.rows()));
  const Index ca = a.cols(), cb = b.cols();
  Matrix<Scalar> out(a.rows(), ca + cb);
  out.leftCols(ca) = a.value();
  out.rightCols(cb) = b.value();
  return a.tape()->Record(
      internal::WithLastDim<Scalar>(a.shape(), ca + cb), std::move(out), {a, b},
      [a, b, ca, cb](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        if (a.requires_grad()) t.Accumulate(a, g.leftCols(ca));
        if (b.requires_grad()) t.Accumulate(b, g.rightCols(cb));
      });
}

/// Stacks 2-D pieces along the leading axis. Last axes must agree.
template <typename Scalar>
Var<Scalar> ConcatRows(const std::vector<Var<Scalar>>& parts) {
  if (parts.empty()) throw ShapeError("ConcatRows: no inputs");
  const Index cols = parts.front().cols();
  Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols)
      throw ShapeError("ConcatRows: last axis " + std::to_string(p.cols()) +
                       " != " + std::to_string(cols));
    rows += p.rows();
  }
  Matrix<Scalar> out(rows, cols);
  std::vector<Index> offsets;
  offsets.reserve(parts.size());
  Index r = 0;
  for (const auto& p : parts) {
    offsets.push_back(r);
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return parts.front().tape()->Record(
      Shape{rows, cols}, std::move(out), parts,
      [parts, offsets](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        for (size_t i = 0; i < parts.size(); ++i)
          if (parts[i].requires_grad())
            t.Accumulate(parts[i], g.middleRows(offsets[i], parts[i].rows()));
      });
}

/// Rows [begin, end) of a 2-D value.
template <typename Scalar>
Var<Scalar> SliceRows(const Var<Scalar>& a, Index begin, Index end) {
  if (begin < 0 || end > a.rows() || begin > end)
    throw ShapeError("SliceRows: range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") outside leading size " +
                     std::to_string(a.rows()));
  Matrix<Scalar> out = a.value().middleRows(begin, end - begin);
  return a.tape()->Record(
      Shape{end - begin, a.cols()}, std::move(out), {a},
      [a, begin, end](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> ga = Matrix<Scalar>::Zero(a.rows(), a.cols());
        ga.middleRows(begin, end - begin) = g;
        t.Accumulate(a, ga);
      });
}

/// Columns [begin, end) of the last axis.
template <typename Scalar>
Var<Scalar> SliceCols(const Var<Scalar>& a, Index begin, Index end) {
  if (begin < 0 || end > a.cols() || begin > end)
    throw ShapeError("SliceCols: range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") outside last axis " +
                     std::to_string(a.cols()));
  Matrix<Scalar> out = a.value().middleCols(begin, end - begin);
  return a.tape()->Record(
      internal::WithLastDim<Scalar>(a.shape(), end - begin), std::move(out),
      {a}, [a, begin, end](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> ga = Matrix<Scalar>::Zero(a.rows(), a.cols());
        ga.middleCols(begin, end - begin) = g;
        t.Accumulate(a, ga);
      });
}

template <typename Scalar>
Var<Scalar> Row(const Var<Scalar>& a, Index i) {
  return SliceRows(a, i, i + 1);
}

/// Same data, new shape with identical element count.
template <typename Scalar>
Var<Scalar> Reshape(const Var<Scalar>& a, Shape shape) {
  if (shape.numel() != a.numel())
    throw ShapeError("Reshape: " + a.shape().ToString() + " -> " +
                     shape.ToString() + " changes element count");
  const Index ar = a.rows(), ac = a.cols();
  Matrix<Scalar> out = a.value().template reshaped<Eigen::RowMajor>(shape.rows(), shape.cols());
  return a.tape()->Record(
      std::move(shape), std::move(out), {a},
      [a, ar, ac](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> ga = g.template reshaped<Eigen::RowMajor>(ar, ac);
        t.Accumulate(a, ga);
      });
}

/// Row lookup into a [n x c] table.
template <typename Scalar>
Var<Scalar> GatherRows(const Var<Scalar>& table, const std::vector<Index>& idx) {
  const Index n = table.rows();
  Matrix<Scalar> out(static_cast<Index>(idx.size()), table.cols());
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= n)
      throw ShapeError("GatherRows: index " + std::to_string(idx[i]) +
                       " outside table of " + std::to_string(n) + " rows");
    out.row(static_cast<Index>(i)) = table.value().row(idx[i]);
  }
  return table.tape()->Record(
      Shape{static_cast<Index>(idx.size()), table.cols()}, std::move(out),
      {table}, [table, idx](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        Matrix<Scalar> gt = Matrix<Scalar>::Zero(table.rows(), table.cols());
        for (size_t i = 0; i < idx.size(); ++i)
          gt.row(idx[i]) += g.row(static_cast<Index>(i));
        t.Accumulate(table, gt);
      });
}

/// Every pairwise sum a_i + b_j: [n x c], [m x c] -> [n x m x c].
template <typename Scalar>
Var<Scalar> PairwiseSum(const Var<Scalar>& a, const Var<Scalar>& b) {
  if (a.cols() != b.cols())
    throw ShapeError("PairwiseSum: last axis " + std::to_string(a.cols()) +
                     " != " + std::to_string(b.cols()));
  const Index n = a.rows(), m = b.rows(), c = a.cols();
  Matrix<Scalar> out(n * m, c);
  for (Index i = 0; i < n; ++i)
    out.middleRows(i * m, m) = b.value().rowwise() + a.value().row(i);
  return a.tape()->Record(
      Shape{n, m, c}, std::move(out), {a, b},
      [a, b, n, m, c](Tape<Scalar>& t, const Matrix<Scalar>& g) {
        if (a.requires_grad()) {
          Matrix<Scalar> ga(n, c);
          for (Index i = 0; i < n; ++i)
            ga.row(i) = g.middleRows(i * m, m).colwise().sum();
          t.Accumulate(a, ga);
        }
        if (b.requires_grad()) {
          Matrix<Scalar> gb = Matrix<Scalar>::Zero(m, c);
          for (Index i = 0; i < n; ++i) gb += g.middleRows(i * m, m);
          t.Accumulate(b, gb);
        }
      });
}

}  // namespace anchored

#endif  // ANCHORED_NUMERICS_OPS_HPP_
