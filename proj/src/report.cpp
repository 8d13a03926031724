// report.cpp

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

#include "anchored/evalreport/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace anchored {

using nlohmann::json;

void CellReport::Add(const TokenSequence& ref, const TokenSequence& hyp) {
  EditCounts c = EditDistance(ref, hyp);
  counts.substitutions += c.substitutions;
  counts.insertions += c.insertions;
  counts.deletions += c.deletions;
  ref_tokens += ref.size();
  ++utterances;
}

double CellReport::wer() const {
  if (ref_tokens == 0) return 0.0;
  return 100.0 * double(counts.errors()) / double(ref_tokens);
}

namespace {
double Share(Index part, Index total) {
  return total == 0 ? 0.0 : double(part) / double(total);
}
}  // namespace

double CellReport::sub_share() const { return Share(counts.substitutions, counts.errors()); }
double CellReport::ins_share() const { return Share(counts.insertions, counts.errors()); }
double CellReport::del_share() const { return Share(counts.deletions, counts.errors()); }

const CellReport& ConditionReport::Cell(double snr_db, double shift_pct) const {
  for (const auto& c : cells)
    if (c.snr_db == snr_db && c.shift_pct == shift_pct) return c;
  throw std::out_of_range("report " + system + " has no cell snr=" +
                          std::to_string(snr_db) + " shift=" + std::to_string(shift_pct));
}

double Werr(const ConditionReport& model, const ConditionReport& baseline,
            std::vector<std::string>* excluded) {
  if (model.cells.size() != baseline.cells.size())
    throw std::invalid_argument("werr: reports have different cell sets");
  double sum = 0;
  int n = 0;
  for (const auto& b : baseline.cells) {
    const CellReport& m = model.Cell(b.snr_db, b.shift_pct);
    if (b.wer() == 0.0) {
      if (excluded) excluded->push_back(b.name);
      continue;
    }
    sum += (b.wer() - m.wer()) / b.wer();
    ++n;
  }
  return n == 0 ? 0.0 : 100.0 * sum / n;
}

namespace {

std::vector<double> Sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string Fixed(double v, int prec) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string Pad(const std::string& s, size_t w, bool left = false) {
  if (s.size() >= w) return s;
  return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
}

}  // namespace

std::string FormatTable(const std::vector<ConditionReport>& systems,
                        const ConditionReport* reference) {
  if (systems.empty()) return "";
  std::vector<double> snrs, shifts;
  for (const auto& c : systems.front().cells) {
    snrs.push_back(c.snr_db);
    shifts.push_back(c.shift_pct);
  }
  snrs = Sorted(snrs);
  shifts = Sorted(shifts);
  size_t name_w = 6;
  for (const auto& s : systems) name_w = std::max(name_w, s.system.size());
  const size_t col_w = 7;
  const size_t group_w = col_w * snrs.size();
  std::ostringstream os;
  os << Pad("", name_w, true);
  for (double sh : shifts)
    os << " |" << Pad("Shift = " + Fixed(sh, 0) + "%", group_w);
  if (reference) os << " |" << Pad("WERR", 8);
  os << "\n" << Pad("SNR", name_w, true);
  for (size_t g = 0; g < shifts.size(); ++g) {
    os << " |";
    for (double snr : snrs) os << Pad(Fixed(snr, 0), col_w);
  }
  if (reference) os << " |" << Pad("(%)", 8);
  os << "\n" << std::string(name_w + shifts.size() * (group_w + 2) + (reference ? 10 : 0), '-')
     << "\n";
  for (const auto& s : systems) {
    os << Pad(s.system, name_w, true);
    for (double sh : shifts) {
      os << " |";
      for (double snr : snrs) os << Pad(Fixed(s.Cell(snr, sh).wer(), 2), col_w);
    }
    if (reference) {
      os << " |"
         << Pad(&s == reference || s.system == reference->system
                    ? "-"
                    : Fixed(Werr(s, *reference), 1),
                8);
    }
    os << "\n";
  }
  return os.str();
}

json ToJson(const ConditionReport& r, const ConditionReport* reference) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"name", c.name},
                     {"snr_db", c.snr_db},
                     {"shift_pct", c.shift_pct},
                     {"utterances", c.utterances},
                     {"failed", c.failed},
                     {"ref_tokens", c.ref_tokens},
                     {"substitutions", c.counts.substitutions},
                     {"insertions", c.counts.insertions},
                     {"deletions", c.counts.deletions},
                     {"wer", c.wer()},
                     {"sub_share", c.sub_share()},
                     {"ins_share", c.ins_share()},
                     {"del_share", c.del_share()}});
  }
  json j = {{"system", r.system}, {"cells", cells}};
  if (reference) {
    std::vector<std::string> excluded;
    j["werr"] = {{"reference", reference->system},
                 {"value_pct", Werr(r, *reference, &excluded)},
                 {"aggregation", "unweighted mean over cells"},
                 {"excluded_cells", excluded}};
  }
  return j;
}

ConditionReport ReportFromJson(const json& j) {
  ConditionReport r;
  r.system = j.at("system");
  for (const auto& jc : j.at("cells")) {
    CellReport c;
    c.name = jc.at("name");
    c.snr_db = jc.at("snr_db");
    c.shift_pct = jc.at("shift_pct");
    c.utterances = jc.at("utterances");
    c.failed = jc.at("failed");
    c.ref_tokens = jc.at("ref_tokens");
    c.counts.substitutions = jc.at("substitutions");
    c.counts.insertions = jc.at("insertions");
    c.counts.deletions = jc.at("deletions");
    r.cells.push_back(c);
  }
  return r;
}

GateHistogram::GateHistogram() : target(size_t(bins), 0), background(size_t(bins), 0) {}

void GateHistogram::Add(const std::vector<double>& gate, Index main_len_raw,
                        Index stack_factor) {
  for (size_t t = 0; t < gate.size(); ++t) {
    const double b = gate[t];
    const Index start = Index(t) * stack_factor;
    const bool is_target = start + stack_factor <= main_len_raw;
    const bool is_background = start >= main_len_raw;
    if (!is_target && !is_background) continue;
    min_value = std::min(min_value, b);
    max_value = std::max(max_value, b);
    int bin = int(std::floor((b - lo) / (hi - lo) * bins));
    bin = std::clamp(bin, 0, bins - 1);
    if (is_target) {
      ++target[bin];
      sum_target += b;
      ++n_target;
    } else {
      ++background[bin];
      sum_background += b;
      ++n_background;
    }
  }
}

double GateHistogram::mean_target() const {
  return n_target ? sum_target / double(n_target) : 0.0;
}
double GateHistogram::mean_background() const {
  return n_background ? sum_background / double(n_background) : 0.0;
}

std::string GateHistogram::ToCsv() const {
  std::ostringstream os;
  os << "bin_start,bin_end,count_target,count_background\n";
  for (int i = 0; i < bins; ++i) {
    const double a = lo + (hi - lo) * i / bins, b = lo + (hi - lo) * (i + 1) / bins;
    os << Fixed(a, 6) << "," << Fixed(b, 6) << "," << target[i] << "," << background[i]
       << "\n";
  }
  return os.str();
}

}  // namespace anchored
