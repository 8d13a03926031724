// mixsim/features_io.hpp

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

// Per-utterance feature container: "AFEA", uint32 rows, uint32 cols,
// uint32 precision bits (32 or 64), then row-major little-endian values.

#ifndef ANCHORED_MIXSIM_FEATURES_IO_HPP_
#define ANCHORED_MIXSIM_FEATURES_IO_HPP_

#include <filesystem>

#include "anchored/transducer/types.hpp"

namespace anchored {

void WriteFeatures(const std::filesystem::path& path, const FeatureMatrix& m,
                   int precision_bits = 32);
FeatureMatrix ReadFeatures(const std::filesystem::path& path);

/// Rounds every entry to the nearest 32-bit float.
FeatureMatrix RoundToFloat(const FeatureMatrix& m);

}  // namespace anchored

#endif  // ANCHORED_MIXSIM_FEATURES_IO_HPP_
