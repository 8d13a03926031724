// transducer/types.hpp

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

#ifndef ANCHORED_TRANSDUCER_TYPES_HPP_
#define ANCHORED_TRANSDUCER_TYPES_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "anchored/numerics/tensor.hpp"

namespace anchored {

/// Output label 0 is the blank symbol; real units are 1..vocab_size.
inline constexpr int kBlank = 0;

/// Raw acoustic frames, time-major (rows are frames).
using FeatureMatrix = Matrix<double>;

class TokenSequence {
 public:
  TokenSequence() = default;
  explicit TokenSequence(std::vector<int> tokens) : tokens_(std::move(tokens)) {
    for (int t : tokens_)
      if (t <= kBlank)
        throw std::invalid_argument("token sequence contains blank or negative id " +
                                    std::to_string(t));
  }

  /// Rejects ids above the vocabulary.
  void Validate(int vocab_size) const {
    for (int t : tokens_)
      if (t > vocab_size)
        throw std::out_of_range("token " + std::to_string(t) +
                                " outside vocabulary of size " +
                                std::to_string(vocab_size));
  }

  const std::vector<int>& tokens() const { return tokens_; }
  Index size() const { return static_cast<Index>(tokens_.size()); }
  bool empty() const { return tokens_.empty(); }
  int operator[](Index i) const { return tokens_[static_cast<size_t>(i)]; }

  bool operator==(const TokenSequence&) const = default;

 private:
  std::vector<int> tokens_;
};

/// One utterance as the recogniser sees it.
struct FeatureSequence {
  std::string id;
  FeatureMatrix frames;
  TokenSequence transcript;
  /// Anchor length in raw frames.
  Index anchor_len_frames = 1;
  /// Optional per-frame labels (the generating token of each frame).
  std::vector<int> frame_labels;

  Index num_frames() const { return frames.rows(); }

  void Validate() const {
    if (anchor_len_frames < 1 || anchor_len_frames > frames.rows())
      throw std::invalid_argument(
          "utterance " + id + ": anchor length " +
          std::to_string(anchor_len_frames) + " outside [1, " +
          std::to_string(frames.rows()) + "]");
    if (!frame_labels.empty() &&
        static_cast<Index>(frame_labels.size()) != frames.rows())
      throw std::invalid_argument("utterance " + id + ": " +
                                  std::to_string(frame_labels.size()) +
                                  " frame labels for " +
                                  std::to_string(frames.rows()) + " frames");
  }
};

}  // namespace anchored

#endif  // ANCHORED_TRANSDUCER_TYPES_HPP_
