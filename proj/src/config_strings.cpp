// config_strings.cpp

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

#include <stdexcept>
#include <string>

#include "anchored/aux_objectives/objectives.hpp"
#include "anchored/transducer/config.hpp"

namespace anchored {

std::string ToString(EncoderKind k) {
  return k == EncoderKind::kRecurrent ? "recurrent" : "chunked_attention";
}

std::string ToString(BaselineKind k) {
  switch (k) {
    case BaselineKind::kNone: return "none";
    case BaselineKind::kAms: return "ams";
    case BaselineKind::kAmc: return "amc";
  }
  return "none";
}

std::string ToString(ObjectiveMode m) {
  switch (m) {
    case ObjectiveMode::kNone: return "none";
    case ObjectiveMode::kFr: return "fr";
    case ObjectiveMode::kVic: return "vic";
    case ObjectiveMode::kBoth: return "both";
  }
  return "none";
}

EncoderKind ParseEncoderKind(const std::string& s) {
  if (s == "recurrent") return EncoderKind::kRecurrent;
  if (s == "chunked_attention") return EncoderKind::kChunkedAttention;
  throw std::invalid_argument("unknown encoder kind '" + s +
                              "' (expected recurrent or chunked_attention)");
}

BaselineKind ParseBaselineKind(const std::string& s) {
  if (s == "none") return BaselineKind::kNone;
  if (s == "ams") return BaselineKind::kAms;
  if (s == "amc") return BaselineKind::kAmc;
  throw std::invalid_argument("unknown baseline '" + s + "' (expected none, ams or amc)");
}

ObjectiveMode ParseObjectiveMode(const std::string& s) {
  if (s == "none") return ObjectiveMode::kNone;
  if (s == "fr") return ObjectiveMode::kFr;
  if (s == "vic") return ObjectiveMode::kVic;
  if (s == "both") return ObjectiveMode::kBoth;
  throw std::invalid_argument("unknown objective mode '" + s +
                              "' (expected none, fr, vic or both)");
}

}  // namespace anchored
