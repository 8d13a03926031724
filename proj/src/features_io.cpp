// features_io.cpp

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

#include "anchored/mixsim/features_io.hpp"

#include <fstream>
#include <stdexcept>

#include "anchored/util/binary_io.hpp"

namespace anchored {

namespace {
constexpr char kMagic[5] = "AFEA";
}

void WriteFeatures(const std::filesystem::path& path, const FeatureMatrix& m,
                   int precision_bits) {
  if (precision_bits != 32 && precision_bits != 64)
    throw std::invalid_argument("feature precision must be 32 or 64");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  io::WriteMagic(os, kMagic);
  io::WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  io::WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
  io::WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(precision_bits));
  for (Index i = 0; i < m.size(); ++i) {
    if (precision_bits == 32)
      io::WriteLe<float>(os, static_cast<float>(m.data()[i]));
    else
      io::WriteLe<double>(os, m.data()[i]);
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

FeatureMatrix ReadFeatures(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("missing feature file " + path.string());
  const std::string what = "feature file " + path.string();
  io::ExpectMagic(is, kMagic, what);
  const auto rows = io::ReadLe<std::uint32_t>(is, what);
  const auto cols = io::ReadLe<std::uint32_t>(is, what);
  const auto bits = io::ReadLe<std::uint32_t>(is, what);
  if (bits != 32 && bits != 64)
    throw std::runtime_error(what + ": unsupported precision " + std::to_string(bits));
  FeatureMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i)
    m.data()[i] = bits == 32 ? io::ReadLe<float>(is, what) : io::ReadLe<double>(is, what);
  return m;
}

FeatureMatrix RoundToFloat(const FeatureMatrix& m) {
  return m.cast<float>().cast<double>();
}

}  // namespace anchored
