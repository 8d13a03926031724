// transducer/config.hpp

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

#ifndef ANCHORED_TRANSDUCER_CONFIG_HPP_
#define ANCHORED_TRANSDUCER_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "anchored/numerics/tensor.hpp"

namespace anchored {

enum class EncoderKind { kRecurrent, kChunkedAttention };
enum class BaselineKind { kNone, kAms, kAmc };

/// Sub-segment windows for per-frame embeddings, in encoder frames.
struct SubsegmentConfig {
  Index block = 4;
  Index left_ctx = 32;
  Index right_ctx = 4;

  void Validate() const {
    if (block < 1) throw std::invalid_argument("subsegment block must be >= 1");
    if (left_ctx < 0 || right_ctx < 0)
      throw std::invalid_argument("subsegment contexts must be >= 0");
  }
};

/// Architecture of every trainable component. Everything that changes the
/// parameter set lives here so a checkpoint header fully describes its model.
struct ModelConfig {
  // Front-end: per-frame projection, then `stack_factor` frames are stacked
  // and projected to d_model.
  Index d_raw = 16;
  Index front_dim = 16;
  Index stack_factor = 4;
  Index d_model = 64;

  EncoderKind encoder_kind = EncoderKind::kRecurrent;
  Index encoder_layers = 2;
  // Chunked attention only: frames per chunk and visible past chunks.
  Index attention_chunk = 4;
  Index attention_left_chunks = 2;
  Index attention_ffn_dim = 128;

  Index predictor_layers = 1;
  Index joiner_dim = 64;
  /// |Y|, excluding blank.
  Index vocab_size = 16;

  // Anchoring.
  bool enable_bias = false;
  bool enable_gating = false;
  Index context_dim = 32;
  Index aux_hidden = 32;
  Index aux_kernel = 3;
  SubsegmentConfig subsegment;

  BaselineKind baseline = BaselineKind::kNone;

  // Auxiliary objectives (only used in training).
  Index num_frame_labels = 17;
  Index fr_label_dim = 16;
  Index fr_hidden = 64;
  Index expander_dim = 128;
  Index expander_hidden = 128;

  /// 32 or 64; the precision training runs in.
  int precision = 32;

  bool uses_anchor() const {
    return enable_bias || enable_gating || baseline != BaselineKind::kNone;
  }
  bool uses_aux_net() const { return enable_bias || enable_gating; }
  Index encoder_lookahead() const {
    return encoder_kind == EncoderKind::kChunkedAttention ? attention_chunk - 1
                                                          : 0;
  }

  void Validate() const {
    auto req = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("model config: ") + what);
    };
    req(d_raw >= 1, "d_raw >= 1");
    req(front_dim >= 1, "front_dim >= 1");
    req(stack_factor >= 1, "stack_factor >= 1");
    req(d_model >= 1, "d_model >= 1");
    req(encoder_layers >= 1, "encoder_layers >= 1");
    req(attention_chunk >= 1 && attention_left_chunks >= 0,
        "attention chunking");
    req(predictor_layers >= 1, "predictor_layers >= 1");
    req(joiner_dim >= 1, "joiner_dim >= 1");
    req(vocab_size >= 2, "vocab_size >= 2");
    req(context_dim >= 1, "context_dim >= 1");
    req(aux_hidden >= 1 && aux_kernel >= 1 && aux_kernel % 2 == 1,
        "aux net needs hidden >= 1 and an odd kernel");
    req(num_frame_labels >= 1, "num_frame_labels >= 1");
    req(expander_dim >= context_dim, "expander_dim >= context_dim");
    req(precision == 32 || precision == 64, "precision is 32 or 64");
    subsegment.Validate();
  }
};

std::string ToString(EncoderKind k);
std::string ToString(BaselineKind k);
EncoderKind ParseEncoderKind(const std::string& s);
BaselineKind ParseBaselineKind(const std::string& s);

}  // namespace anchored

#endif  // ANCHORED_TRANSDUCER_CONFIG_HPP_
