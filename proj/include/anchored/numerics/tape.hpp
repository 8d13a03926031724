// numerics/tape.hpp

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

#ifndef ANCHORED_NUMERICS_TAPE_HPP_
#define ANCHORED_NUMERICS_TAPE_HPP_

#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "anchored/numerics/tensor.hpp"

namespace anchored {

template <typename Scalar>
class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; only valid while the
/// owning tape is alive.
template <typename Scalar>
class Var {
 public:
  Var() = default;
  Var(Tape<Scalar>* tape, Index id) : tape_(tape), id_(id) {}

  Tape<Scalar>* tape() const { return tape_; }
  Index id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Matrix<Scalar>& value() const { return tape_->value(id_); }
  const Shape& shape() const { return tape_->shape(id_); }
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  Index numel() const { return shape().numel(); }
  bool requires_grad() const { return tape_->requires_grad(id_); }
  /// Convenience accessor for scalar results.
  Scalar item() const {
    if (numel() != 1) throw ShapeError("item() on non-scalar " + shape().ToString());
    return value()(0, 0);
  }

 private:
  Tape<Scalar>* tape_ = nullptr;
  Index id_ = -1;
};

enum class GradMode { kEnabled, kDisabled };

/// Linear record of primitive operations. Nodes are appended in evaluation
/// order, so every node's inputs precede it and a reverse sweep is a valid
/// topological traversal.
template <typename Scalar>
class Tape {
 public:
  /// Receives the gradient of the root wrt this node's output and pushes
  /// contributions to the node's inputs through Tape::Accumulate.
  using BackwardFn = std::function<void(Tape&, const Matrix<Scalar>&)>;

  explicit Tape(GradMode mode = GradMode::kEnabled) : mode_(mode) {
    nodes_.reserve(256);
  }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  GradMode mode() const { return mode_; }
  size_t size() const { return nodes_.size(); }

  /// Records a persistent tensor. Its data is referenced, not copied, so the
  /// tensor must outlive the tape. Gradients are accumulated into the tensor
  /// when it requires grad.
  Var<Scalar> Leaf(Tensor<Scalar>& t) {
    Node n;
    n.shape = t.shape();
    n.external = &t.data();
    n.leaf = &t;
    n.requires_grad = mode_ == GradMode::kEnabled && t.requires_grad();
    return Push(std::move(n));
  }

  Var<Scalar> Constant(const Tensor<Scalar>& t) {
    return Constant(t.shape(), t.data());
  }
  Var<Scalar> Constant(Shape shape, Matrix<Scalar> value) {
    Node n;
    n.shape = std::move(shape);
    n.value = std::move(value);
    CheckConforms(n);
    return Push(std::move(n));
  }
  Var<Scalar> Constant(Matrix<Scalar> value) {
    Shape s{value.rows(), value.cols()};
    return Constant(std::move(s), std::move(value));
  }

  /// Appends the result of a primitive. `backward` is kept only when some
  /// input requires grad.
  Var<Scalar> Record(Shape shape, Matrix<Scalar> value,
                     std::initializer_list<Var<Scalar>> inputs,
                     BackwardFn backward) {
    bool needs = false;
    for (const auto& in : inputs) {
      CheckOwned(in);
      needs = needs || requires_grad(in.id());
    }
    return Record(std::move(shape), std::move(value), needs,
                  std::move(backward));
  }
  Var<Scalar> Record(Shape shape, Matrix<Scalar> value,
                     const std::vector<Var<Scalar>>& inputs,
                     BackwardFn backward) {
    bool needs = false;
    for (const auto& in : inputs) {
      CheckOwned(in);
      needs = needs || requires_grad(in.id());
    }
    return Record(std::move(shape), std::move(value), needs,
                  std::move(backward));
  }

  /// Adds `g` to the pending gradient of `v`. No-op for nodes that do not
  /// require grad.
  void Accumulate(const Var<Scalar>& v, const Matrix<Scalar>& g) {
    Node& n = nodes_[static_cast<size_t>(v.id())];
    if (!n.requires_grad) return;
    const Matrix<Scalar>& val = n.external ? *n.external : n.value;
    if (g.rows() != val.rows() || g.cols() != val.cols())
      throw ShapeError("gradient " + std::to_string(g.rows()) + "x" +
                       std::to_string(g.cols()) + " for node of shape " +
                       n.shape.ToString());
    if (!n.has_grad) {
      n.grad = g;
      n.has_grad = true;
    } else {
      n.grad += g;
    }
  }

  /// Reverse sweep from a scalar root. Leaf tensors receive d(root)/d(leaf)
  /// added to whatever they already hold; interior gradients are reset at the
  /// start of every sweep.
  void Backward(const Var<Scalar>& root) {
    CheckOwned(root);
    if (root.numel() != 1)
      throw std::invalid_argument("backward root must be scalar, got shape " +
                                  root.shape().ToString());
    for (Node& n : nodes_) {
      n.has_grad = false;
      n.grad.resize(0, 0);
    }
    Node& r = nodes_[static_cast<size_t>(root.id())];
    if (!r.requires_grad) return;
    r.grad = Matrix<Scalar>::Ones(1, 1);
    r.has_grad = true;
    for (Index i = root.id(); i >= 0; --i) {
      Node& n = nodes_[static_cast<size_t>(i)];
      if (!n.requires_grad || !n.has_grad) continue;
      if (n.leaf) {
        n.leaf->AccumulateGrad(n.grad);
      } else if (n.backward) {
        n.backward(*this, n.grad);
      }
    }
  }

  const Matrix<Scalar>& value(Index id) const {
    const Node& n = nodes_[static_cast<size_t>(id)];
    return n.external ? *n.external : n.value;
  }
  const Shape& shape(Index id) const {
    return nodes_[static_cast<size_t>(id)].shape;
  }
  bool requires_grad(Index id) const {
    return nodes_[static_cast<size_t>(id)].requires_grad;
  }

 private:
  struct Node {
    Shape shape;
    Matrix<Scalar> value;
    const Matrix<Scalar>* external = nullptr;
    Tensor<Scalar>* leaf = nullptr;
    bool requires_grad = false;
    bool has_grad = false;
    Matrix<Scalar> grad;
    BackwardFn backward;
  };

  Var<Scalar> Record(Shape shape, Matrix<Scalar> value, bool needs,
                     BackwardFn backward) {
    Node n;
    n.shape = std::move(shape);
    n.value = std::move(value);
    CheckConforms(n);
    n.requires_grad = needs && mode_ == GradMode::kEnabled;
    if (n.requires_grad) n.backward = std::move(backward);
    return Push(std::move(n));
  }

  Var<Scalar> Push(Node n) {
    nodes_.push_back(std::move(n));
    return Var<Scalar>(this, static_cast<Index>(nodes_.size()) - 1);
  }

  void CheckOwned(const Var<Scalar>& v) const {
    if (v.tape() != this || v.id() < 0 ||
        v.id() >= static_cast<Index>(nodes_.size()))
      throw std::invalid_argument("variable does not belong to this tape");
  }

  static void CheckConforms(const Node& n) {
    if (n.value.rows() != n.shape.rows() || n.value.cols() != n.shape.cols())
      throw ShapeError("recorded value " + std::to_string(n.value.rows()) +
                       "x" + std::to_string(n.value.cols()) +
                       " does not match shape " + n.shape.ToString());
  }

  GradMode mode_;
  std::vector<Node> nodes_;
};

}  // namespace anchored

#endif  // ANCHORED_NUMERICS_TAPE_HPP_
