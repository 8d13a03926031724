// numerics/tensor.hpp

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

#ifndef ANCHORED_NUMERICS_TENSOR_HPP_
#define ANCHORED_NUMERICS_TENSOR_HPP_

#include <Eigen/Dense>

#include <initializer_list>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace anchored {

using Index = Eigen::Index;

/// Row-major dense matrix; every tensor is stored as one of these with the
/// last axis as columns and all leading axes folded into rows.
template <typename Scalar>
using Matrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Raised when operands are not conformable. The message names the
/// offending dimension.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<Index> dims) : dims_(dims) { Validate(); }
  explicit Shape(std::vector<Index> dims) : dims_(std::move(dims)) {
    Validate();
  }

  Index rank() const { return static_cast<Index>(dims_.size()); }
  Index operator[](Index i) const { return dims_.at(static_cast<size_t>(i)); }
  const std::vector<Index>& dims() const { return dims_; }

  Index numel() const {
    return std::accumulate(dims_.begin(), dims_.end(), Index{1},
                           std::multiplies<>());
  }
  /// Size of the last axis (1 for a scalar).
  Index cols() const { return dims_.empty() ? 1 : dims_.back(); }
  /// Product of all leading axes.
  Index rows() const { return cols() == 0 ? 0 : numel() / cols(); }

  bool operator==(const Shape& other) const = default;

  std::string ToString() const {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < dims_.size(); ++i) {
      if (i) os << " x ";
      os << dims_[i];
    }
    os << ']';
    return os.str();
  }

 private:
  void Validate() const {
    for (Index d : dims_)
      if (d < 0) throw ShapeError("negative dimension in shape");
  }

  std::vector<Index> dims_;
};

/// Dense tensor value with an optional gradient accumulator. Tensors that
/// outlive a tape (model parameters) are the leaves gradients flow into.
template <typename Scalar_>
class Tensor {
 public:
  using Scalar = Scalar_;

  Tensor() : shape_(), data_(Matrix<Scalar>::Zero(1, 1)) {}

  Tensor(Shape shape, Matrix<Scalar> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.rows() != shape_.rows() || data_.cols() != shape_.cols())
      throw ShapeError("tensor data " + std::to_string(data_.rows()) + "x" +
                       std::to_string(data_.cols()) +
                       " does not match shape " + shape_.ToString());
  }

  static Tensor Zeros(const Shape& shape) {
    return Tensor(shape, Matrix<Scalar>::Zero(shape.rows(), shape.cols()));
  }
  static Tensor FromMatrix(Matrix<Scalar> m) {
    Shape s{m.rows(), m.cols()};
    return Tensor(std::move(s), std::move(m));
  }
  static Tensor FromVector(const std::vector<Scalar>& v) {
    Matrix<Scalar> m(1, static_cast<Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) m(0, static_cast<Index>(i)) = v[i];
    return Tensor(Shape{static_cast<Index>(v.size())}, std::move(m));
  }

  const Shape& shape() const { return shape_; }
  const Matrix<Scalar>& data() const { return data_; }
  Matrix<Scalar>& data() { return data_; }
  Index numel() const { return shape_.numel(); }

  bool requires_grad() const { return requires_grad_; }
  Tensor& set_requires_grad(bool on) {
    requires_grad_ = on;
    return *this;
  }

  bool has_grad() const { return grad_.has_value(); }
  const Matrix<Scalar>& grad() const {
    if (!grad_) throw std::logic_error("tensor has no gradient");
    return *grad_;
  }
  void AccumulateGrad(const Matrix<Scalar>& g) {
    if (g.rows() != data_.rows() || g.cols() != data_.cols())
      throw ShapeError("gradient shape mismatch for tensor " +
                       shape_.ToString());
    if (!grad_)
      grad_ = g;
    else
      *grad_ += g;
  }
  void ZeroGrad() { grad_.reset(); }

  template <typename Other>
  Tensor<Other> Cast() const {
    Tensor<Other> out(shape_, data_.template cast<Other>());
    out.set_requires_grad(requires_grad_);
    return out;
  }

 private:
  Shape shape_;
  Matrix<Scalar> data_;
  bool requires_grad_ = false;
  std::optional<Matrix<Scalar>> grad_;
};

}  // namespace anchored

#endif  // ANCHORED_NUMERICS_TENSOR_HPP_
