// evalreport/wer.hpp

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

#ifndef ANCHORED_EVALREPORT_WER_HPP_
#define ANCHORED_EVALREPORT_WER_HPP_

#include "anchored/transducer/types.hpp"

namespace anchored {

struct EditCounts {
  Index substitutions = 0;
  Index insertions = 0;
  Index deletions = 0;

  Index errors() const { return substitutions + insertions + deletions; }
  bool operator==(const EditCounts&) const = default;
};

/// Minimal-cost Levenshtein alignment of hyp against ref. Among optimal
/// alignments, deletions are preferred to insertions and insertions to
/// substitutions.
EditCounts EditDistance(const TokenSequence& ref, const TokenSequence& hyp);

}  // namespace anchored

#endif  // ANCHORED_EVALREPORT_WER_HPP_
