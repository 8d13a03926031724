// anchoring_test.cpp

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
#include <random>
#include <vector>

#include "doctest.h"

#include "anchored/anchoring/anchored_model.hpp"
#include "anchored/transducer/rnnt_loss.hpp"
#include "test_util.hpp"

using namespace anchored;
using anchored::testing::RandomMatrix;

namespace {

ModelConfig SmallConfig() {
  ModelConfig c;
  c.d_raw = 3;
  c.front_dim = 4;
  c.stack_factor = 2;
  c.d_model = 5;
  c.encoder_layers = 1;
  c.joiner_dim = 4;
  c.vocab_size = 3;
  c.context_dim = 4;
  c.aux_hidden = 3;
  c.num_frame_labels = 4;
  c.fr_label_dim = 2;
  c.fr_hidden = 3;
  c.expander_dim = 6;
  c.expander_hidden = 5;
  c.subsegment = {2, 3, 1};
  return c;
}

FeatureSequence RandomUtterance(std::mt19937_64& rng, Index frames, Index d,
                                std::vector<int> tokens, Index anchor) {
  FeatureSequence s;
  s.id = "u";
  s.frames = RandomMatrix(rng, frames, d);
  s.transcript = TokenSequence(std::move(tokens));
  s.anchor_len_frames = anchor;
  for (Index i = 0; i < frames; ++i) s.frame_labels.push_back(int(i % 4));
  return s;
}

}  // namespace

TEST_CASE("gate bias special values") {
  Tape<double> tape;
  Matrix<double> c(1, 3), o(1, 3);
  c << 1, 2, -1;
  o << 2, -1, 0;
  auto cv = tape.Constant(c);
  CHECK(GateBias(cv, tape.Constant(c)).item() == doctest::Approx(kGateMax).epsilon(1e-15));
  CHECK(GateBias(cv, tape.Constant(Matrix<double>(-c))).item() ==
        doctest::Approx(kGateMin).epsilon(1e-15));
  CHECK(GateBias(cv, tape.Constant(o)).item() == 0.5);
  CHECK(std::abs(kGateMax - 1.0 / (1.0 + std::exp(-1.0))) < 1e-16);
  const long before = DegenerateGateCount().load();
  CHECK(GateBias(cv, tape.Constant(Matrix<double>::Zero(1, 3))).item() == 0.5);
  CHECK(DegenerateGateCount().load() == before + 1);
}

TEST_CASE("gate bias is invariant to positive rescaling") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    Matrix<double> c = RandomMatrix(rng, 1, 5), h = RandomMatrix(rng, 1, 5);
    Tape<double> tape;
    const double ref = GateBias(tape.Constant(c), tape.Constant(h)).item();
    CHECK(ref >= kGateMin);
    CHECK(ref <= kGateMax);
    for (double a : {0.1, 1.0, 10.0})
      for (double b : {0.1, 1.0, 10.0}) {
        const double v =
            GateBias(tape.Constant(Matrix<double>(a * c)),
                     tape.Constant(Matrix<double>(b * h))).item();
        CHECK(std::abs(v - ref) < 1e-12);
      }
  }
}

TEST_CASE("sub-segment blocks and clipped windows") {
  SubsegmentConfig cfg;  // block 4, left 32, right 4
  auto one = SubsegmentBlocks(4, cfg);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == std::pair<Index, Index>{0, 4});
  auto three = SubsegmentBlocks(9, cfg);
  REQUIRE(three.size() == 3);
  CHECK(three[2] == std::pair<Index, Index>{8, 9});

  ModelConfig mc = SmallConfig();
  std::mt19937_64 rng(2);
  AuxNet<double> aux(mc, rng);
  Tape<double> tape;
  auto frames = tape.Constant(RandomMatrix(rng, 7, mc.stack_factor * mc.d_raw));
  auto segs = SubsegmentEmbeddings(tape, aux, frames, SubsegmentConfig{2, 3, 1});
  REQUIRE(segs.size() == 4);
  CHECK(segs[0].window_begin == 0);
  CHECK(segs[0].window_end == 3);
  CHECK(segs[2].window_begin == 1);
  CHECK(segs[2].window_end == 7);
  CHECK(segs[3].begin == 6);
  CHECK(segs[3].window_end == 7);
  // The embedding equals the aux net applied to the window directly.
  auto direct = aux(tape, SliceRows(frames, 1, 7));
  CHECK(direct.value() == segs[2].embedding.value());
  CHECK(FrameGateBias(direct, segs).rows() == 7);
}

TEST_CASE("zero-weight aux net returns its bias") {
  ModelConfig mc = SmallConfig();
  std::mt19937_64 rng(3);
  AuxNet<double> aux(mc, rng);
  aux.VisitParams("a", [](const std::string&, Tensor<double>& t) { t.data().setZero(); });
  aux.proj.bias.data() << 1, -2, 3, 0.5;
  Tape<double> tape;
  for (Index n : {1, 4, 9}) {
    auto c = aux(tape, tape.Constant(RandomMatrix(rng, n, mc.stack_factor * mc.d_raw)));
    CHECK(c.value() == aux.proj.bias.data());
  }
  CHECK_THROWS_AS(aux(tape, tape.Constant(Matrix<double>(0, 6))), std::invalid_argument);
}

TEST_CASE("temporal convolution matches a direct zero-padded sum") {
  std::mt19937_64 rng(4);
  TemporalConv<double> conv(2, 3, 3, rng);
  Matrix<double> x = RandomMatrix(rng, 5, 2);
  Tape<double> tape;
  Matrix<double> y = conv(tape, tape.Constant(x)).value();
  const auto& w = conv.taps.weight.data();
  for (Index t = 0; t < 5; ++t)
    for (Index o = 0; o < 3; ++o) {
      double s = conv.taps.bias.data()(0, o);
      for (Index k = 0; k < 3; ++k) {
        const Index src = t + k - 1;
        if (src < 0 || src >= 5) continue;
        for (Index i = 0; i < 2; ++i) s += x(src, i) * w(k * 2 + i, o);
      }
      CHECK(y(t, o) == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("encoder-input biasing") {
  std::mt19937_64 rng(5);
  const Index d = 3, D = 2;
  Linear<double> w(d + D, d, rng, false);
  Tape<double> tape;
  Matrix<double> x = RandomMatrix(rng, 4, d);
  SUBCASE("zero context and identity block give ReLU(x)") {
    w.weight.data().setZero();
    w.weight.data().topRows(d).setIdentity();
    auto out = BiasEncoderInputs(tape, tape.Constant(x),
                                 tape.Constant(Matrix<double>::Zero(1, D)), w);
    CHECK(out.value() == Matrix<double>(x.cwiseMax(0.0)));
  }
  SUBCASE("zeroed input block gives a constant output over time") {
    w.weight.data().topRows(d).setZero();
    auto out = BiasEncoderInputs(tape, tape.Constant(x),
                                 tape.Constant(RandomMatrix(rng, 1, D)), w);
    for (Index t = 1; t < 4; ++t) CHECK(out.value().row(t) == out.value().row(0));
  }
  SUBCASE("mismatched projection is rejected") {
    Linear<double> bad(d + D + 1, d, rng, false);
    CHECK_THROWS_AS(BiasEncoderInputs(tape, tape.Constant(x),
                                      tape.Constant(Matrix<double>::Zero(1, D)), bad),
                    ShapeError);
  }
}

TEST_CASE("joiner gating arithmetic") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const Index T = 1 + i % 5, U = i % 3, L = 4;
    Tape<double> tape;
    LogitLattice<double> lat{tape.Constant(RandomMatrix(rng, T * (U + 1), L, 3.0)),
                             T, U, L};
    std::uniform_real_distribution<double> ub(kGateMin, kGateMax);
    Matrix<double> b(T, 1);
    for (Index t = 0; t < T; ++t) b(t, 0) = ub(rng);
    auto gated = ApplyJoinerGating(lat, tape.Constant(b));
    const auto& z = lat.logits.value();
    const auto& zg = gated.logits.value();
    for (Index t = 0; t < T; ++t)
      for (Index u = 0; u <= U; ++u) {
        const Index r = lat.row(t, u);
        CHECK(zg(r, 0) == z(r, 0) + (1.0 - b(t, 0)));
        Index am = 1, amg = 1;
        for (Index k = 1; k < L; ++k) {
          CHECK(zg(r, k) == z(r, k) + b(t, 0));
          if (z(r, k) > z(r, am)) am = k;
          if (zg(r, k) > zg(r, amg)) amg = k;
        }
        CHECK(am == amg);
      }
  }
  Tape<double> tape;
  LogitLattice<double> lat{tape.Constant(Matrix<double>::Zero(2, 4)), 2, 0, 4};
  CHECK_THROWS_AS(ApplyJoinerGating(lat, tape.Constant(Matrix<double>::Zero(3, 1))),
                  ShapeError);
}

TEST_CASE("gate of one half keeps a uniform lattice uniform") {
  Tape<double> tape;
  LogitLattice<double> lat{tape.Constant(Matrix<double>::Constant(3, 2, 0.7)), 3, 0, 2};
  auto g = ApplyJoinerGating(lat, tape.Constant(Matrix<double>::Constant(3, 1, 0.5)));
  Matrix<double> p = Softmax(g.logits).value();
  CHECK((p.array() - 0.5).abs().maxCoeff() < 1e-15);
}

TEST_CASE("larger gate values raise the odds of emitting") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    Tape<double> tape;
    LogitLattice<double> lat{tape.Constant(RandomMatrix(rng, 1, 5, 2.0)), 1, 0, 5};
    double prev = -1;
    for (double b : {0.27, 0.4, 0.5, 0.6, 0.73}) {
      Matrix<double> p = Softmax(ApplyJoinerGating(
          lat, tape.Constant(Matrix<double>::Constant(1, 1, b))).logits).value();
      const double odds = (1.0 - p(0, 0)) / p(0, 0);
      CHECK(odds > prev);
      prev = odds;
    }
  }
}

TEST_CASE("gating gradient matches finite differences") {
  std::mt19937_64 rng(8);
  const Index T = 3, U = 2;
  Tensor<double> z = anchored::testing::RandomTensor(rng, Shape{T * (U + 1), 4});
  Tensor<double> s = anchored::testing::RandomTensor(rng, Shape{T, 1});
  TokenSequence y({1, 3});
  auto rep = FiniteDifferenceCheck<double>(
      [&](Tape<double>& tape) {
        LogitLattice<double> lat{tape.Leaf(z), T, U, 4};
        return RnntLoss(ApplyJoinerGating(lat, Sigmoid(tape.Leaf(s))), y);
      },
      {{"z", &z}, {"s", &s}});
  CHECK_MESSAGE(rep.passed, anchored::testing::Describe(rep));
}

TEST_CASE("anchored forward with both switches off is the plain transducer") {
  ModelConfig mc = SmallConfig();
  mc.enable_bias = true;
  mc.enable_gating = true;
  AnchoredModel<double> model(mc, 9);
  std::mt19937_64 rng(10);
  auto seq = RandomUtterance(rng, 11, mc.d_raw, {1, 2}, 4);
  Tape<double> t1, t2;
  auto anchored_off = model.Forward(t1, seq, AnchorSpec::Mixed(seq), false, false);
  auto f = model.encoder(t2, model.frontend(t2, t2.Constant(seq.frames)));
  auto plain = model.joiner(t2, f, model.predictor(t2, seq.transcript));
  CHECK(anchored_off.lattice.logits.value() == plain.logits.value());
  CHECK(anchored_off.lattice.frames == 5);
}

TEST_CASE("constant embeddings give the maximal gate everywhere") {
  ModelConfig mc = SmallConfig();
  mc.enable_gating = true;
  AnchoredModel<double> model(mc, 11);
  model.aux->proj.weight.data().setZero();
  model.aux->proj.bias.data() << 0.3, -1, 2, 0.1;
  std::mt19937_64 rng(12);
  auto seq = RandomUtterance(rng, 12, mc.d_raw, {3}, 4);
  Tape<double> tape;
  auto out = model.Forward(tape, seq, AnchorSpec::Mixed(seq));
  for (Index t = 0; t < out.enc.gate.rows(); ++t)
    CHECK(out.enc.gate.value()(t, 0) == doctest::Approx(kGateMax).epsilon(1e-14));
}

TEST_CASE("clean anchors are taken from the supplied features") {
  ModelConfig mc = SmallConfig();
  mc.enable_bias = true;
  AnchoredModel<double> model(mc, 13);
  std::mt19937_64 rng(14);
  auto seq = RandomUtterance(rng, 10, mc.d_raw, {1}, 4);
  AnchorSpec clean{4, AnchorSource::kClean, seq.frames.topRows(4)};
  Tape<double> tape;
  auto a = model.Forward(tape, seq, clean).lattice.logits.value();
  auto b = model.Forward(tape, seq, AnchorSpec::Mixed(seq)).lattice.logits.value();
  CHECK(a == b);
  clean.clean_anchor_features = RandomMatrix(rng, 4, mc.d_raw);
  CHECK(model.Forward(tape, seq, clean).lattice.logits.value() != b);
  AnchorSpec missing{4, AnchorSource::kClean, std::nullopt};
  CHECK_THROWS_AS(model.Forward(tape, seq, missing), std::invalid_argument);
  AnchorSpec tiny{1, AnchorSource::kMixed, std::nullopt};
  CHECK_THROWS_AS(model.Forward(tape, seq, tiny), std::invalid_argument);
}

TEST_CASE("loss gradients reach the aux net through both paths") {
  std::mt19937_64 rng(15);
  for (auto [bias, gating] : {std::pair{true, false}, {false, true}, {true, true}}) {
    ModelConfig mc = SmallConfig();
    mc.enable_bias = bias;
    mc.enable_gating = gating;
    AnchoredModel<double> model(mc, 16);
    auto seq = RandomUtterance(rng, 10, mc.d_raw, {2, 1}, 4);
    Tape<double> tape;
    auto out = model.Forward(tape, seq, AnchorSpec::Mixed(seq));
    tape.Backward(RnntLoss(out.lattice, seq.transcript));
    CHECK(model.aux->proj.weight.grad().norm() > 0);
    CHECK(model.aux->conv1.taps.weight.grad().norm() > 0);
    if (bias) CHECK(model.bias_proj->weight.grad().norm() > 0);

    NamedParams<double> params;
    for (auto& [n, t] : model.NamedParameters())
      if (n.rfind("aux", 0) == 0 || n.rfind("bias_proj", 0) == 0)
        params.emplace_back(n, t);
    GradCheckOptions opt;
    opt.tolerance = 1e-4;
    auto rep = FiniteDifferenceCheck<double>(
        [&](Tape<double>& t) {
          return RnntLoss(model.Forward(t, seq, AnchorSpec::Mixed(seq)).lattice,
                          seq.transcript);
        },
        params, opt);
    CHECK_MESSAGE(rep.passed, anchored::testing::Describe(rep));
  }
}

TEST_CASE("decoding applies the same gate as training") {
  ModelConfig mc = SmallConfig();
  mc.enable_gating = true;
  mc.enable_bias = true;
  AnchoredModel<double> model(mc, 17);
  std::mt19937_64 rng(18);
  auto seq = RandomUtterance(rng, 14, mc.d_raw, {1}, 4);
  auto hyp = model.Decode(seq, AnchorSpec::Mixed(seq));
  Tape<double> tape;
  auto out = model.Forward(tape, seq, AnchorSpec::Mixed(seq));
  REQUIRE(hyp.gate.size() == 7);
  for (Index t = 0; t < 7; ++t) CHECK(hyp.gate[t] == out.enc.gate.value()(t, 0));
  CHECK(hyp.tokens.size() <= 4 * 7);
}

TEST_CASE("precision cast copies every parameter") {
  ModelConfig mc = SmallConfig();
  mc.enable_bias = true;
  mc.baseline = BaselineKind::kNone;
  AnchoredModel<double> d(mc, 19);
  AnchoredModel<float> f(mc, 20);
  f.CopyParamsFrom(d);
  auto pd = d.NamedParameters();
  auto pf = f.NamedParameters();
  REQUIRE(pd.size() == pf.size());
  for (size_t i = 0; i < pd.size(); ++i)
    CHECK(pf[i].second->data() == pd[i].second->data().cast<float>());
  CHECK(d.NumParameters() > 0);
}
