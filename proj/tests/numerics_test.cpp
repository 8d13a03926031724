// tests/numerics_test.cpp

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

#include <cmath>
#include <functional>
#include <random>

#include "anchored/numerics/gradcheck.hpp"
#include "anchored/numerics/ops.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace anchored {
namespace {

using testing::Describe;
using testing::RandomTensor;
using T = Tape<double>;
using V = Var<double>;

TEST_CASE("sigmoid of zero is one half") {
  T tape;
  V x = tape.Constant(Matrix<double>::Zero(1, 1));
  CHECK(Sigmoid(x).item() == 0.5);
}

TEST_CASE("softmax rows sum to one") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    T tape;
    V x = tape.Constant(testing::RandomMatrix(rng, 3, 9, 10.0));
    Matrix<double> p = Softmax(x).value();
    for (Index r = 0; r < p.rows(); ++r)
      CHECK(std::abs(p.row(r).sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("relu of a concatenation") {
  T tape;
  Matrix<double> a(1, 2), b(1, 1);
  a << 1, -2;
  b << 3;
  Matrix<double> y = Relu(ConcatCols(tape.Constant(a), tape.Constant(b))).value();
  REQUIRE(y.cols() == 3);
  CHECK(y(0, 0) == 1);
  CHECK(y(0, 1) == 0);
  CHECK(y(0, 2) == 3);
}

TEST_CASE("shape mismatch names the dimension") {
  T tape;
  V a = tape.Constant(Matrix<double>::Zero(2, 3));
  V b = tape.Constant(Matrix<double>::Zero(4, 2));
  try {
    MatMul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("inner dimension") != std::string::npos);
  }
  CHECK_THROWS_AS(Add(a, tape.Constant(Matrix<double>::Zero(3, 2))), ShapeError);
}

TEST_CASE("tensor invariants") {
  Tensor<double> t = Tensor<double>::Zeros(Shape{2, 3, 4});
  CHECK(t.data().size() == t.shape().numel());
  CHECK(t.data().rows() == 6);
  CHECK_THROWS_AS(Tensor<double>(Shape{2, 2}, Matrix<double>::Zero(3, 2)),
                  ShapeError);
  t.AccumulateGrad(Matrix<double>::Ones(6, 4));
  CHECK(t.grad().rows() == t.data().rows());
  CHECK_THROWS_AS(t.AccumulateGrad(Matrix<double>::Ones(4, 6)), ShapeError);
}

TEST_CASE("linear gradient equals input") {
  std::mt19937_64 rng(1);
  Tensor<double> w = RandomTensor(rng, Shape{1, 5});
  Matrix<double> x = testing::RandomMatrix(rng, 1, 5);
  T tape;
  V root = Sum(Mul(tape.Leaf(w), tape.Constant(x)));
  tape.Backward(root);
  CHECK((w.grad() - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sigmoid derivative") {
  Tensor<double> s = Tensor<double>::FromMatrix(Matrix<double>::Constant(1, 1, 0.7));
  s.set_requires_grad(true);
  T tape;
  tape.Backward(Sigmoid(tape.Leaf(s)));
  const double sig = 1.0 / (1.0 + std::exp(-0.7));
  CHECK(std::abs(s.grad()(0, 0) - sig * (1 - sig)) < 1e-15);
}

TEST_CASE("backward rejects non-scalar roots") {
  Tensor<double> w = Tensor<double>::Zeros(Shape{2, 2});
  w.set_requires_grad(true);
  T tape;
  CHECK_THROWS_AS(tape.Backward(tape.Leaf(w)), std::invalid_argument);
}

TEST_CASE("two backward passes double the gradient exactly") {
  std::mt19937_64 rng(3);
  Tensor<double> w = RandomTensor(rng, Shape{4, 3});
  Tensor<double> x = RandomTensor(rng, Shape{2, 4});
  T tape;
  V root = Sum(Tanh(MatMul(tape.Leaf(x), tape.Leaf(w))));
  tape.Backward(root);
  Matrix<double> once = w.grad();
  tape.Backward(root);
  CHECK(w.grad() == (once * 2.0).eval());
}

TEST_CASE("gradients are recorded only when needed") {
  Tensor<double> w = Tensor<double>::Zeros(Shape{2, 2});
  T tape;
  V y = MatMul(tape.Leaf(w), tape.Constant(Matrix<double>::Ones(2, 2)));
  CHECK_FALSE(y.requires_grad());
  w.set_requires_grad(true);
  T off(GradMode::kDisabled);
  CHECK_FALSE(MatMul(off.Leaf(w), off.Constant(Matrix<double>::Ones(2, 2)))
                  .requires_grad());
}

TEST_CASE("log-softmax agrees with log of softmax") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix<double> v(1, 7);
    for (Index i = 0; i < v.size(); ++i) v(0, i) = u(rng);
    T tape;
    V x = tape.Constant(v);
    Matrix<double> a = LogSoftmax(x).value();
    Matrix<double> b = Softmax(x).value().array().log();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("finite-difference harness: constant and quadratic losses") {
  Tensor<double> p = Tensor<double>::FromVector({1.0, 2.0});
  SUBCASE("constant") {
    auto build = [](T& tape) {
      return tape.Constant(Matrix<double>::Constant(1, 1, 3.0));
    };
    GradCheckReport r = FiniteDifferenceCheck<double>(build, {{"p", &p}});
    CHECK(r.passed);
    CHECK(r.max_rel_error == 0.0);
    CHECK_FALSE(p.has_grad());
  }
  SUBCASE("quadratic") {
    auto build = [&p](T& tape) { return Sum(Square(tape.Leaf(p))); };
    GradCheckReport r = FiniteDifferenceCheck<double>(build, {{"p", &p}});
    CHECK(r.passed);
    CHECK(p.grad()(0, 0) == 2.0);
    CHECK(p.grad()(0, 1) == 4.0);
  }
  SUBCASE("non-finite loss aborts") {
    auto build = [&p](T& tape) { return Sum(Log(Scale(tape.Leaf(p), -1.0))); };
    GradCheckReport r = FiniteDifferenceCheck<double>(build, {{"p", &p}});
    CHECK_FALSE(r.finite);
    CHECK_FALSE(r.passed);
  }
}

// Randomised per-primitive gradient checks at the strict tolerance.
TEST_CASE("every primitive matches central differences") {
  std::mt19937_64 rng(2024);
  GradCheckOptions opts;
  opts.step = 1e-6;
  opts.tolerance = 1e-6;

  struct Case {
    const char* name;
    std::function<V(T&, std::vector<Tensor<double>>&)> fn;
    std::vector<Shape> shapes;
  };
  // Each case reduces to a scalar through a fixed random projection so every
  // output element contributes with a distinct weight.
  auto project = [](T& tape, const V& y, std::mt19937_64& r) {
    Matrix<double> w = testing::RandomMatrix(r, y.rows(), y.cols());
    return Sum(Mul(y, tape.Constant(y.shape(), w)));
  };
  std::vector<Case> cases = {
      {"matmul", [](T& t, auto& p) { return MatMul(t.Leaf(p[0]), t.Leaf(p[1])); },
       {Shape{3, 4}, Shape{4, 2}}},
      {"transpose", [](T& t, auto& p) { return Transpose(t.Leaf(p[0])); },
       {Shape{3, 4}}},
      {"add", [](T& t, auto& p) { return t.Leaf(p[0]) + t.Leaf(p[1]); },
       {Shape{2, 3}, Shape{2, 3}}},
      {"sub", [](T& t, auto& p) { return t.Leaf(p[0]) - t.Leaf(p[1]); },
       {Shape{2, 3}, Shape{2, 3}}},
      {"mul", [](T& t, auto& p) { return Mul(t.Leaf(p[0]), t.Leaf(p[1])); },
       {Shape{2, 3}, Shape{2, 3}}},
      {"add_row", [](T& t, auto& p) { return AddRow(t.Leaf(p[0]), t.Leaf(p[1])); },
       {Shape{4, 3}, Shape{1, 3}}},
      {"mul_row", [](T& t, auto& p) { return MulRow(t.Leaf(p[0]), t.Leaf(p[1])); },
       {Shape{4, 3}, Shape{1, 3}}},
      {"repeat_row", [](T& t, auto& p) { return RepeatRow(t.Leaf(p[0]), 5); },
       {Shape{1, 3}}},
      {"scale", [](T& t, auto& p) { return Scale(t.Leaf(p[0]), -1.7); },
       {Shape{2, 2}}},
      {"relu", [](T& t, auto& p) { return Relu(t.Leaf(p[0])); }, {Shape{3, 5}}},
      {"sigmoid", [](T& t, auto& p) { return Sigmoid(t.Leaf(p[0])); },
       {Shape{3, 5}}},
      {"tanh", [](T& t, auto& p) { return Tanh(t.Leaf(p[0])); }, {Shape{3, 5}}},
      {"exp", [](T& t, auto& p) { return Exp(t.Leaf(p[0])); }, {Shape{2, 3}}},
      {"sqrt", [](T& t, auto& p) { return Sqrt(AddScalar(Square(t.Leaf(p[0])), 0.5)); },
       {Shape{2, 3}}},
      {"softmax", [](T& t, auto& p) { return Softmax(t.Leaf(p[0])); },
       {Shape{3, 6}}},
      {"log_softmax", [](T& t, auto& p) { return LogSoftmax(t.Leaf(p[0])); },
       {Shape{3, 6}}},
      {"layer_norm",
       [](T& t, auto& p) {
         return LayerNorm(t.Leaf(p[0]), t.Leaf(p[1]), t.Leaf(p[2]));
       },
       {Shape{3, 6}, Shape{1, 6}, Shape{1, 6}}},
      {"mean_rows", [](T& t, auto& p) { return MeanRows(t.Leaf(p[0])); },
       {Shape{5, 3}}},
      {"variance_rows", [](T& t, auto& p) { return VarianceRows(t.Leaf(p[0])); },
       {Shape{5, 3}}},
      {"mse", [](T& t, auto& p) { return Mse(t.Leaf(p[0]), t.Leaf(p[1])); },
       {Shape{3, 4}, Shape{3, 4}}},
      {"cosine",
       [](T& t, auto& p) { return CosineSimilarity(t.Leaf(p[0]), t.Leaf(p[1])); },
       {Shape{1, 6}, Shape{1, 6}}},
      {"offdiag", [](T& t, auto& p) { return OffDiagonalSquaredSum(t.Leaf(p[0])); },
       {Shape{4, 4}}},
      {"concat_rows",
       [](T& t, auto& p) { return ConcatRows<double>({t.Leaf(p[0]), t.Leaf(p[1])}); },
       {Shape{2, 3}, Shape{1, 3}}},
      {"slice_cols", [](T& t, auto& p) { return SliceCols(t.Leaf(p[0]), 1, 4); },
       {Shape{3, 5}}},
      {"slice_rows", [](T& t, auto& p) { return SliceRows(t.Leaf(p[0]), 1, 3); },
       {Shape{4, 3}}},
      {"reshape", [](T& t, auto& p) { return Reshape(t.Leaf(p[0]), Shape{3, 4}); },
       {Shape{2, 6}}},
      {"gather_rows",
       [](T& t, auto& p) { return GatherRows(t.Leaf(p[0]), {2, 0, 2, 1}); },
       {Shape{3, 4}}},
      {"pairwise_sum",
       [](T& t, auto& p) { return PairwiseSum(t.Leaf(p[0]), t.Leaf(p[1])); },
       {Shape{3, 4}, Shape{2, 4}}},
  };

  for (auto& c : cases) {
    CAPTURE(c.name);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<Tensor<double>> inputs;
      for (const auto& s : c.shapes) inputs.push_back(RandomTensor(rng, s));
      NamedParams<double> params;
      for (size_t i = 0; i < inputs.size(); ++i)
        params.emplace_back("in" + std::to_string(i), &inputs[i]);
      const std::uint64_t proj_seed = rng();
      auto build = [&](T& tape) {
        std::mt19937_64 prng(proj_seed);
        return project(tape, c.fn(tape, inputs), prng);
      };
      GradCheckReport r = FiniteDifferenceCheck<double>(build, params, opts);
      CHECK_MESSAGE(r.passed, Describe(r));
    }
  }
}

TEST_CASE("random three-layer composition matches central differences") {
  std::mt19937_64 rng(99);
  Tensor<double> x = RandomTensor(rng, Shape{4, 5});
  Tensor<double> w1 = RandomTensor(rng, Shape{5, 6}, 0.5);
  Tensor<double> b1 = RandomTensor(rng, Shape{1, 6}, 0.1);
  Tensor<double> w2 = RandomTensor(rng, Shape{6, 6}, 0.5);
  Tensor<double> w3 = RandomTensor(rng, Shape{6, 3}, 0.5);
  auto build = [&](T& tape) {
    V h1 = Tanh(AddRow(MatMul(tape.Leaf(x), tape.Leaf(w1)), tape.Leaf(b1)));
    V h2 = Sigmoid(MatMul(h1, tape.Leaf(w2)));
    V h3 = LogSoftmax(MatMul(h2, tape.Leaf(w3)));
    return Mean(h3);
  };
  GradCheckReport r = FiniteDifferenceCheck<double>(
      build, {{"x", &x}, {"w1", &w1}, {"b1", &b1}, {"w2", &w2}, {"w3", &w3}});
  CHECK_MESSAGE(r.passed, Describe(r));
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("cosine similarity of a zero vector is zero") {
  T tape;
  V a = tape.Constant(Matrix<double>::Zero(1, 3));
  V b = tape.Constant(Matrix<double>::Ones(1, 3));
  CHECK(CosineSimilarity(a, b).item() == 0.0);
}

TEST_CASE("log-add-exp handles infinities") {
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(LogAddExp(ninf, 1.5) == 1.5);
  CHECK(LogAddExp(2.0, ninf) == 2.0);
  CHECK(std::abs(LogAddExp(std::log(0.25), std::log(0.5)) - std::log(0.75)) < 1e-15);
}

}  // namespace
}  // namespace anchored
