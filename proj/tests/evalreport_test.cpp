// evalreport_test.cpp

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

#include <algorithm>
#include <functional>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "anchored/anchoring/gating.hpp"
#include "anchored/evalreport/report.hpp"
#include "anchored/evalreport/wer.hpp"
#include "anchored/mixsim/mixing.hpp"

using namespace anchored;

namespace {

TokenSequence Seq(std::vector<int> v) { return TokenSequence(std::move(v)); }

// Plain recursive edit distance, no memo.
int SlowDistance(const std::vector<int>& a, size_t i, const std::vector<int>& b, size_t j) {
  if (i == a.size()) return int(b.size() - j);
  if (j == b.size()) return int(a.size() - i);
  const int sub = SlowDistance(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0 : 1);
  const int del = SlowDistance(a, i + 1, b, j) + 1;
  const int ins = SlowDistance(a, i, b, j + 1) + 1;
  return std::min({sub, del, ins});
}

std::vector<std::vector<int>> AllSequences(int max_len, int symbols) {
  std::vector<std::vector<int>> out{{}};
  std::vector<std::vector<int>> frontier{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& s : frontier)
      for (int k = 1; k <= symbols; ++k) {
        auto t = s;
        t.push_back(k);
        next.push_back(t);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

CellReport MakeCell(double snr, double shift, Index ref_tokens, Index subs) {
  CellReport c;
  c.name = CellName(snr, shift);
  c.snr_db = snr;
  c.shift_pct = shift;
  c.utterances = 1;
  c.ref_tokens = ref_tokens;
  c.counts.substitutions = subs;
  return c;
}

}  // namespace

TEST_CASE("edit distance matches the recursive definition on all short sequences") {
  const auto all = AllSequences(4, 3);
  long checked = 0;
  for (const auto& r : all)
    for (const auto& h : all) {
      const EditCounts c = EditDistance(Seq(r), Seq(h));
      REQUIRE(c.errors() == SlowDistance(r, 0, h, 0));
      // Counts must describe a real alignment.
      REQUIRE(Index(h.size()) - Index(r.size()) == c.insertions - c.deletions);
      REQUIRE(c.substitutions + c.deletions <= Index(r.size()));
      ++checked;
    }
  CHECK(checked == long(all.size() * all.size()));
}

TEST_CASE("edit distance on length-5 sequences") {
  const std::vector<int> r{1, 2, 3, 1, 2};
  for (const auto& h : AllSequences(5, 3)) {
    const EditCounts c = EditDistance(Seq(r), Seq(h));
    REQUIRE(c.errors() == SlowDistance(r, 0, h, 0));
  }
}

TEST_CASE("worked example: one substitution and one insertion") {
  // a b c vs a x c d
  const EditCounts c = EditDistance(Seq({1, 2, 3}), Seq({1, 9, 3, 4}));
  CHECK(c == EditCounts{1, 1, 0});
  CellReport cell;
  cell.Add(Seq({1, 2, 3}), Seq({1, 9, 3, 4}));
  CHECK(cell.wer() == doctest::Approx(200.0 / 3.0));
  CHECK(cell.sub_share() == doctest::Approx(0.5));
  CHECK(cell.ins_share() == doctest::Approx(0.5));
  CHECK(cell.del_share() == 0.0);
}

TEST_CASE("empty reference and hypothesis") {
  CHECK(EditDistance(Seq({}), Seq({})) == EditCounts{});
  CHECK(EditDistance(Seq({1, 2}), Seq({})) == EditCounts{0, 0, 2});
  CHECK(EditDistance(Seq({}), Seq({3})) == EditCounts{0, 1, 0});
}

TEST_CASE("werr is zero against itself and averages per cell") {
  ConditionReport base{"base", {MakeCell(1, 0, 100, 20), MakeCell(5, 0, 100, 10)}};
  ConditionReport model{"model", {MakeCell(1, 0, 100, 10), MakeCell(5, 0, 100, 10)}};
  CHECK(Werr(base, base) == 0.0);
  // cell 1: 50 %, cell 2: 0 %
  CHECK(Werr(model, base) == doctest::Approx(25.0));
}

TEST_CASE("werr skips cells with zero baseline errors") {
  ConditionReport base{"base", {MakeCell(1, 0, 100, 20), MakeCell(5, 0, 100, 0)}};
  ConditionReport model{"model", {MakeCell(1, 0, 100, 15), MakeCell(5, 0, 100, 3)}};
  std::vector<std::string> excluded;
  CHECK(Werr(model, base, &excluded) == doctest::Approx(25.0));
  REQUIRE(excluded.size() == 1);
  CHECK(excluded[0] == CellName(5, 0));
}

TEST_CASE("report survives a json round trip") {
  ConditionReport r{"sys", {MakeCell(1, 0, 40, 3), MakeCell(50, 100, 40, 1)}};
  r.cells[0].counts.insertions = 2;
  r.cells[1].failed = 1;
  const ConditionReport back = ReportFromJson(ToJson(r, nullptr));
  REQUIRE(back.cells.size() == 2);
  CHECK(back.system == "sys");
  CHECK(back.cells[0].counts == r.cells[0].counts);
  CHECK(back.cells[1].failed == 1);
  CHECK(back.cells[1].wer() == doctest::Approx(r.cells[1].wer()));
  const auto j = ToJson(r, &r);
  CHECK(j["werr"]["value_pct"].get<double>() == 0.0);
}

TEST_CASE("table lists every cell and the werr column") {
  ConditionReport base{"base", {}}, model{"model", {}};
  for (double shift : {0.0, 50.0, 100.0})
    for (double snr : {1.0, 5.0, 10.0, 20.0, 50.0}) {
      base.cells.push_back(MakeCell(snr, shift, 100, 10));
      model.cells.push_back(MakeCell(snr, shift, 100, 5));
    }
  const std::string table = FormatTable({base, model}, &base);
  CHECK(table.find("Shift = 50%") != std::string::npos);
  CHECK(table.find("WERR") != std::string::npos);
  CHECK(table.find("50.0") != std::string::npos);
  CHECK(table.find("10.00") != std::string::npos);
}

TEST_CASE("gate histogram splits target and background frames") {
  GateHistogram h;
  CHECK(h.lo == kGateMin);
  CHECK(h.hi == kGateMax);
  // stack 2, main speech covers raw frames [0, 5): frames 0,1 target,
  // frame 2 straddles, frames 3,4 background.
  h.Add({0.7, 0.6, 0.5, 0.3, kGateMin}, 5, 2);
  CHECK(h.n_target == 2);
  CHECK(h.n_background == 2);
  CHECK(h.mean_target() == doctest::Approx(0.65));
  CHECK(h.mean_background() == doctest::Approx((0.3 + kGateMin) / 2));
  CHECK(h.background[0] >= 1);
  Index total = 0;
  for (int i = 0; i < h.bins; ++i) total += h.target[i] + h.background[i];
  CHECK(total == 4);
  const std::string csv = h.ToCsv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == h.bins + 1);
}
