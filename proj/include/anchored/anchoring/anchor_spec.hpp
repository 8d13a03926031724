// anchoring/anchor_spec.hpp

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

#ifndef ANCHORED_ANCHORING_ANCHOR_SPEC_HPP_
#define ANCHORED_ANCHORING_ANCHOR_SPEC_HPP_

#include <optional>
#include <stdexcept>
#include <string>

#include "anchored/transducer/types.hpp"

namespace anchored {

enum class AnchorSource { kClean, kMixed };

/// Which frames form the anchor: the first T_w raw frames of the utterance
/// as heard (mixed), or the same span taken from the clean main utterance.
struct AnchorSpec {
  Index anchor_len_raw_frames = 1;
  AnchorSource source = AnchorSource::kMixed;
  std::optional<FeatureMatrix> clean_anchor_features;

  static AnchorSpec Mixed(const FeatureSequence& seq) {
    return {seq.anchor_len_frames, AnchorSource::kMixed, std::nullopt};
  }

  /// The anchor frames [T_w x d_raw].
  FeatureMatrix Frames(const FeatureSequence& seq) const {
    if (anchor_len_raw_frames < 1 || anchor_len_raw_frames > seq.num_frames())
      throw std::invalid_argument("anchor length " +
                                  std::to_string(anchor_len_raw_frames) +
                                  " outside [1, " +
                                  std::to_string(seq.num_frames()) + "]");
    if (source == AnchorSource::kMixed)
      return seq.frames.topRows(anchor_len_raw_frames);
    if (!clean_anchor_features ||
        clean_anchor_features->rows() != anchor_len_raw_frames ||
        clean_anchor_features->cols() != seq.frames.cols())
      throw std::invalid_argument(
          "clean anchor requested without matching clean anchor features");
    return *clean_anchor_features;
  }
};

}  // namespace anchored

#endif  // ANCHORED_ANCHORING_ANCHOR_SPEC_HPP_
