// util/binary_io.hpp

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

// Little-endian scalar IO for the feature and checkpoint containers.

#ifndef ANCHORED_UTIL_BINARY_IO_HPP_
#define ANCHORED_UTIL_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace anchored::io {

namespace internal {

template <typename U>
U ToLittle(U v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    U out = 0;
    for (size_t i = 0; i < sizeof(U); ++i) {
      out = static_cast<U>((out << 8) | (v & 0xff));
      v = static_cast<U>(v >> 8);
    }
    return out;
  }
}

}  // namespace internal

template <typename T>
void WriteLe(std::ostream& os, T value) {
  static_assert(std::is_arithmetic_v<T>);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::uint16_t>>;
  U bits = internal::ToLittle(std::bit_cast<U>(value));
  os.write(reinterpret_cast<const char*>(&bits), sizeof(U));
}

template <typename T>
T ReadLe(std::istream& is, const std::string& what) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::uint16_t>>;
  U bits;
  if (!is.read(reinterpret_cast<char*>(&bits), sizeof(U)))
    throw std::runtime_error("truncated " + what);
  return std::bit_cast<T>(internal::ToLittle(bits));
}

inline void WriteMagic(std::ostream& os, const char (&magic)[5]) { os.write(magic, 4); }

inline void ExpectMagic(std::istream& is, const char (&magic)[5],
                        const std::string& what) {
  char got[4] = {};
  if (!is.read(got, 4) || std::memcmp(got, magic, 4) != 0)
    throw std::runtime_error(what + ": bad magic, expected " + std::string(magic));
}

}  // namespace anchored::io

#endif  // ANCHORED_UTIL_BINARY_IO_HPP_
