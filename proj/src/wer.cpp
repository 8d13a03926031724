// wer.cpp

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

#include "anchored/evalreport/wer.hpp"

#include <vector>

namespace anchored {

EditCounts EditDistance(const TokenSequence& ref, const TokenSequence& hyp) {
  const Index n = ref.size(), m = hyp.size();
  struct Cell {
    Index cost;
    EditCounts c;
  };
  std::vector<Cell> prev(size_t(m) + 1), cur(size_t(m) + 1);
  for (Index j = 0; j <= m; ++j) prev[j] = {j, {0, j, 0}};
  for (Index i = 1; i <= n; ++i) {
    cur[0] = {i, {0, 0, i}};
    for (Index j = 1; j <= m; ++j) {
      const bool match = ref[i - 1] == hyp[j - 1];
      Cell del = prev[j], ins = cur[j - 1], diag = prev[j - 1];
      del.cost += 1;
      del.c.deletions += 1;
      ins.cost += 1;
      ins.c.insertions += 1;
      if (!match) {
        diag.cost += 1;
        diag.c.substitutions += 1;
      }
      // Preference order among equal costs: match, deletion, insertion,
      // substitution.
      Cell best = match ? diag : del;
      for (const Cell* c : {&del, &ins, &diag})
        if (c->cost < best.cost) best = *c;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m].c;
}

}  // namespace anchored
