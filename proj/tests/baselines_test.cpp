// baselines_test.cpp

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

#include <random>

#include "doctest.h"

#include "anchored/anchoring/anchored_model.hpp"
#include "anchored/transducer/rnnt_loss.hpp"
#include "test_util.hpp"

using namespace anchored;
using anchored::testing::RandomMatrix;

TEST_CASE("anchor mean") {
  FeatureMatrix one(1, 3);
  one << 1, -2, 5;
  CHECK(AnchorMean(one) == one.row(0));
  FeatureMatrix two(2, 2);
  two << 1, 3, 3, 1;
  CHECK(AnchorMean(two) == RowVector<double>::Constant(2, 2.0));
  FeatureMatrix constant = FeatureMatrix::Constant(7, 4, 0.25);
  CHECK(AnchorMean(constant) == RowVector<double>::Constant(4, 0.25));
  CHECK_THROWS_AS(AnchorMean(FeatureMatrix(0, 3)), std::invalid_argument);
}

TEST_CASE("anchor mean subtraction") {
  std::mt19937_64 rng(1);
  FeatureMatrix x = RandomMatrix(rng, 6, 3);
  CHECK(ApplyAms(x, RowVector<double>::Zero(3)) == x);
  FeatureMatrix c = FeatureMatrix::Constant(4, 3, 1.5);
  CHECK(ApplyAms(c, AnchorMean(c)).isZero(0.0));
  RowVector<double> m = RandomMatrix(rng, 1, 3).row(0);
  CHECK((ApplyAms(ApplyAms(x, m), m) - (x.rowwise() - 2.0 * m)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(AnchorMean(ApplyAms(x, AnchorMean(x))).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(ApplyAms(x, RowVector<double>::Zero(2)), ShapeError);
}

TEST_CASE("anchor mean concatenation") {
  std::mt19937_64 rng(2);
  const Index d = 3;
  AmcTransform<double> amc(d);
  Tape<double> tape;
  Matrix<double> x = RandomMatrix(rng, 5, d);
  Matrix<double> m = RandomMatrix(rng, 1, d);
  SUBCASE("starts as the identity on frames") {
    CHECK(amc(tape, tape.Constant(x), tape.Constant(m)).value() == x);
  }
  SUBCASE("[I; -I] reproduces subtraction exactly") {
    amc.affine.weight.data().bottomRows(d) = -Matrix<double>::Identity(d, d);
    auto a = amc(tape, tape.Constant(x), tape.Constant(m)).value();
    auto s = ApplyAms(tape.Constant(x), tape.Constant(m)).value();
    CHECK(a == s);
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(amc(tape, tape.Constant(x), tape.Constant(Matrix<double>(m.leftCols(2)))),
                    ShapeError);
  }
  SUBCASE("gradient reaches W") {
    NamedParams<double> params{{"W", &amc.affine.weight}, {"b", &amc.affine.bias}};
    auto rep = FiniteDifferenceCheck<double>(
        [&](Tape<double>& t) {
          auto y = amc(t, t.Constant(x), t.Constant(m));
          return Sum(Square(Tanh(y)));
        },
        params);
    CHECK_MESSAGE(rep.passed, anchored::testing::Describe(rep));
  }
}

TEST_CASE("AMC with the subtraction matrix is bit-identical to AMS end to end") {
  ModelConfig cfg;
  cfg.d_raw = 4;
  cfg.d_model = 8;
  cfg.joiner_dim = 8;
  cfg.vocab_size = 5;
  cfg.baseline = BaselineKind::kAms;
  AnchoredModel<double> ams(cfg, 3);
  cfg.baseline = BaselineKind::kAmc;
  AnchoredModel<double> amc(cfg, 3);
  CHECK(ams.NumParameters() + 2 * 4 * 4 + 4 == amc.NumParameters());
  amc.amc->affine.weight.data().bottomRows(4) = -Matrix<double>::Identity(4, 4);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    FeatureSequence s;
    s.frames = RandomMatrix(rng, 8 + i % 9, 4);
    s.transcript = TokenSequence({1 + i % 5, 2});
    s.anchor_len_frames = 4 + i % 4;
    Tape<double> ta, tc;
    auto la = ams.Forward(ta, s, AnchorSpec::Mixed(s)).lattice;
    auto lc = amc.Forward(tc, s, AnchorSpec::Mixed(s)).lattice;
    CHECK(la.logits.value() == lc.logits.value());
    CHECK(RnntLoss(la, s.transcript).item() == RnntLoss(lc, s.transcript).item());
  }
}
