// pipeline/checkpoint.hpp

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

// Versioned checkpoint container: model config header, named float32
// parameter tensors and optional optimizer state.
//
// Layout, all integers little-endian:
//   "ACKP" u32 version
//   u32 header_bytes, header JSON {"model": ModelConfig, "meta": {...}}
//   u32 tensor_count, per tensor: u32 name_bytes, name, u32 rank,
//     u64 dims[rank], f32 values (row-major)
//   u32 has_optimizer, then u64 step and per tensor f32 first and second
//     moments in tensor order

#ifndef ANCHORED_PIPELINE_CHECKPOINT_HPP_
#define ANCHORED_PIPELINE_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "anchored/anchoring/anchored_model.hpp"

namespace anchored {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Shape shape;
  Matrix<float> values;
};

struct OptimizerState {
  std::uint64_t step = 0;
  std::vector<Matrix<float>> m;
  std::vector<Matrix<float>> v;
};

struct Checkpoint {
  ModelConfig config;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<NamedTensor> params;
  std::optional<OptimizerState> optimizer;
};

/// Writes to a temporary file and renames it over `path`, so an existing
/// checkpoint is only replaced by a complete one.
void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

template <typename Scalar>
Checkpoint CaptureCheckpoint(AnchoredModel<Scalar>& model) {
  Checkpoint c;
  c.config = model.config;
  for (auto& [name, t] : model.NamedParameters())
    c.params.push_back({name, t->shape(), t->data().template cast<float>()});
  return c;
}

/// Copies checkpoint values into a model built from the same config.
template <typename Scalar>
void RestoreParams(const Checkpoint& c, AnchoredModel<Scalar>& model) {
  auto named = model.NamedParameters();
  if (named.size() != c.params.size())
    throw std::runtime_error("checkpoint has " + std::to_string(c.params.size()) +
                             " tensors, model expects " + std::to_string(named.size()));
  for (size_t i = 0; i < named.size(); ++i) {
    const NamedTensor& p = c.params[i];
    if (p.name != named[i].first || p.shape != named[i].second->shape())
      throw std::runtime_error("checkpoint tensor " + p.name + " " +
                               p.shape.ToString() + " does not match model tensor " +
                               named[i].first + " " +
                               named[i].second->shape().ToString());
    named[i].second->data() = p.values.template cast<Scalar>();
  }
}

/// A model of the checkpoint's configuration holding its parameters.
template <typename Scalar>
AnchoredModel<Scalar> ModelFromCheckpoint(const Checkpoint& c) {
  AnchoredModel<Scalar> model(c.config, 0);
  RestoreParams(c, model);
  return model;
}

}  // namespace anchored

#endif  // ANCHORED_PIPELINE_CHECKPOINT_HPP_
