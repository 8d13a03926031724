// checkpoint.cpp

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

#include "anchored/pipeline/checkpoint.hpp"

#include <fstream>

#include "anchored/pipeline/experiment_config.hpp"
#include "anchored/util/binary_io.hpp"

namespace anchored {

namespace {

constexpr std::uint32_t kMaxNameBytes = 1u << 16;
constexpr std::uint32_t kMaxHeaderBytes = 1u << 24;

void WriteFloats(std::ostream& os, const Matrix<float>& m) {
  for (Index i = 0; i < m.size(); ++i) io::WriteLe(os, m.data()[i]);
}

Matrix<float> ReadFloats(std::istream& is, Index rows, Index cols, const std::string& what) {
  Matrix<float> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = io::ReadLe<float>(is, what);
  return m;
}

std::string ReadString(std::istream& is, std::uint32_t n, const std::string& what) {
  std::string s(n, '\0');
  if (n && !is.read(s.data(), n)) throw std::runtime_error("truncated " + what);
  return s;
}

}  // namespace

void SaveCheckpoint(const Checkpoint& c, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    io::WriteMagic(os, "ACKP");
    io::WriteLe<std::uint32_t>(os, kCheckpointVersion);
    const std::string header =
        nlohmann::json{{"model", ToJson(c.config)}, {"meta", c.meta}}.dump();
    io::WriteLe<std::uint32_t>(os, std::uint32_t(header.size()));
    os.write(header.data(), std::streamsize(header.size()));
    io::WriteLe<std::uint32_t>(os, std::uint32_t(c.params.size()));
    for (const NamedTensor& p : c.params) {
      io::WriteLe<std::uint32_t>(os, std::uint32_t(p.name.size()));
      os.write(p.name.data(), std::streamsize(p.name.size()));
      io::WriteLe<std::uint32_t>(os, std::uint32_t(p.shape.rank()));
      for (Index d : p.shape.dims()) io::WriteLe<std::uint64_t>(os, std::uint64_t(d));
      if (p.values.size() != p.shape.numel())
        throw std::logic_error("checkpoint tensor " + p.name + " has " +
                               std::to_string(p.values.size()) + " values for shape " +
                               p.shape.ToString());
      WriteFloats(os, p.values);
    }
    io::WriteLe<std::uint32_t>(os, c.optimizer ? 1u : 0u);
    if (c.optimizer) {
      const OptimizerState& o = *c.optimizer;
      if (o.m.size() != c.params.size() || o.v.size() != c.params.size())
        throw std::logic_error("optimizer state does not match the parameter list");
      io::WriteLe<std::uint64_t>(os, o.step);
      for (size_t i = 0; i < c.params.size(); ++i) {
        WriteFloats(os, o.m[i]);
        WriteFloats(os, o.v[i]);
      }
    }
    if (!os.flush()) throw std::runtime_error("error writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint not found: " + path.string());
  const std::string what = "checkpoint " + path.string();
  io::ExpectMagic(is, "ACKP", what);
  const auto version = io::ReadLe<std::uint32_t>(is, what);
  if (version != kCheckpointVersion)
    throw std::runtime_error(what + ": format version " + std::to_string(version) +
                             ", this build reads " + std::to_string(kCheckpointVersion));
  const auto header_bytes = io::ReadLe<std::uint32_t>(is, what);
  if (header_bytes > kMaxHeaderBytes) throw std::runtime_error(what + ": header too large");
  const nlohmann::json header = nlohmann::json::parse(ReadString(is, header_bytes, what));
  Checkpoint c;
  c.config = ModelConfigFromJson(header.at("model"));
  c.meta = header.at("meta");
  const auto count = io::ReadLe<std::uint32_t>(is, what);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor p;
    const auto name_bytes = io::ReadLe<std::uint32_t>(is, what);
    if (name_bytes > kMaxNameBytes) throw std::runtime_error(what + ": bad tensor name");
    p.name = ReadString(is, name_bytes, what);
    const auto rank = io::ReadLe<std::uint32_t>(is, what);
    if (rank > 8) throw std::runtime_error(what + ": tensor " + p.name + " rank " +
                                           std::to_string(rank));
    std::vector<Index> dims;
    for (std::uint32_t r = 0; r < rank; ++r)
      dims.push_back(Index(io::ReadLe<std::uint64_t>(is, what)));
    p.shape = Shape(dims);
    p.values = ReadFloats(is, p.shape.rows(), p.shape.cols(), what);
    c.params.push_back(std::move(p));
  }
  if (io::ReadLe<std::uint32_t>(is, what)) {
    OptimizerState o;
    o.step = io::ReadLe<std::uint64_t>(is, what);
    for (const NamedTensor& p : c.params) {
      o.m.push_back(ReadFloats(is, p.values.rows(), p.values.cols(), what));
      o.v.push_back(ReadFloats(is, p.values.rows(), p.values.cols(), what));
    }
    c.optimizer = std::move(o);
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error(what + ": trailing bytes");
  return c;
}

}  // namespace anchored
