// evalreport/report.hpp

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

// Per-condition WER tables, relative WER reduction and gate histograms.

#ifndef ANCHORED_EVALREPORT_REPORT_HPP_
#define ANCHORED_EVALREPORT_REPORT_HPP_

#include <string>
#include <vector>

#include "json.hpp"

#include "anchored/evalreport/wer.hpp"

namespace anchored {

struct CellReport {
  std::string name;
  double snr_db = 0;
  double shift_pct = 0;
  Index utterances = 0;
  Index failed = 0;  // utterances that could not be decoded
  Index ref_tokens = 0;
  EditCounts counts;

  void Add(const TokenSequence& ref, const TokenSequence& hyp);
  double wer() const;
  /// Share of all errors that are substitutions, insertions or deletions.
  double sub_share() const;
  double ins_share() const;
  double del_share() const;
};

struct ConditionReport {
  std::string system;
  std::vector<CellReport> cells;

  const CellReport& Cell(double snr_db, double shift_pct) const;
};

/// Unweighted mean over cells of (WER_base - WER_model) / WER_base, in
/// percent. Cells whose baseline WER is 0 are skipped and listed in
/// `excluded` when given.
double Werr(const ConditionReport& model, const ConditionReport& baseline,
            std::vector<std::string>* excluded = nullptr);

/// Aligned text table: one row per system, columns grouped by shift and
/// ordered by SNR, WERR against `reference` (if any) in the last column.
std::string FormatTable(const std::vector<ConditionReport>& systems,
                        const ConditionReport* reference);

nlohmann::json ToJson(const ConditionReport& r, const ConditionReport* reference);
ConditionReport ReportFromJson(const nlohmann::json& j);

/// Gate values split into frames of target speech and of background only.
struct GateHistogram {
  double lo = 0.2689414213699951;
  double hi = 0.7310585786300049;
  int bins = 20;
  std::vector<Index> target;
  std::vector<Index> background;
  double sum_target = 0;
  double sum_background = 0;
  Index n_target = 0;
  Index n_background = 0;
  double min_value = 1;
  double max_value = 0;

  GateHistogram();
  /// Encoder frame t covers raw frames [s t, s t + s). Frames entirely inside
  /// the main speech [0, main_len) count as target; frames starting at or
  /// after main_len as background. Straddling frames are ignored.
  void Add(const std::vector<double>& gate, Index main_len_raw, Index stack_factor);
  double mean_target() const;
  double mean_background() const;
  std::string ToCsv() const;
};

}  // namespace anchored

#endif  // ANCHORED_EVALREPORT_REPORT_HPP_
