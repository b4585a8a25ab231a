/* Copyright 2026 The asdbench Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "asdbench/binary_io.hpp"
#include "asdbench/detectors/features.hpp"
#include "asdbench/error.hpp"
#include "asdbench/nnet/model_io.hpp"

namespace asdbench::detectors {

enum class DetectorKind { ae, oe, gmm, knn, serial, ensemble };

inline std::string_view to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::ae: return "ae";
    case DetectorKind::oe: return "oe";
    case DetectorKind::gmm: return "gmm";
    case DetectorKind::knn: return "knn";
    case DetectorKind::serial: return "serial";
    case DetectorKind::ensemble: return "ensemble";
  }
  return "ae";
}

inline std::optional<DetectorKind> parse_detector_kind(std::string_view s) {
  for (auto k : {DetectorKind::ae, DetectorKind::oe, DetectorKind::gmm, DetectorKind::knn, DetectorKind::serial,
                 DetectorKind::ensemble}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

/// Named binary blocks plus a JSON description; the on-disk form of a scorer.
///
/// Binary file: "ASDS", u32 version, u32 block count, then per block
/// u32 name length, name, u32 type (0 densenet, 1 matrix), u64 size, payload.
/// The `.json` sidecar carries the scorer description and a block directory.
class ScorerArchive {
 public:
  enum class BlockType : std::uint32_t { densenet = 0, matrix = 1 };
  static constexpr std::uint32_t kVersion = 1;

  nlohmann::json meta = nlohmann::json::object();

  void put_net(const std::string& name, const nnet::DenseNet& net) {
    std::ostringstream os(std::ios::binary);
    nnet::write_net(os, net);
    blocks_[name] = {BlockType::densenet, os.str()};
  }
  void put_matrix(const std::string& name, const RowMatrix& m) {
    std::ostringstream os(std::ios::binary);
    binary::write_matrix(os, m);
    blocks_[name] = {BlockType::matrix, os.str()};
  }

  nnet::DenseNet get_net(const std::string& name) const {
    std::istringstream is(block(name, BlockType::densenet), std::ios::binary);
    return nnet::read_net(is);
  }
  RowMatrix get_matrix(const std::string& name) const {
    std::istringstream is(block(name, BlockType::matrix), std::ios::binary);
    return binary::read_matrix(is);
  }
  bool has(const std::string& name) const { return blocks_.count(name) != 0; }

  void save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::io, "cannot write scorer '" + path.string() + "'");
    binary::write_magic(os, "ASDS");
    binary::write_u32(os, kVersion);
    binary::write_u32(os, static_cast<std::uint32_t>(blocks_.size()));
    nlohmann::json directory = nlohmann::json::array();
    for (const auto& [name, b] : blocks_) {
      binary::write_u32(os, static_cast<std::uint32_t>(name.size()));
      os.write(name.data(), static_cast<std::streamsize>(name.size()));
      binary::write_u32(os, static_cast<std::uint32_t>(b.type));
      binary::write_u64(os, b.bytes.size());
      os.write(b.bytes.data(), static_cast<std::streamsize>(b.bytes.size()));
      directory.push_back({{"name", name},
                           {"type", b.type == BlockType::densenet ? "densenet" : "matrix"},
                           {"bytes", b.bytes.size()}});
    }
    if (!os) throw Error(ErrorCode::io, "short write to scorer '" + path.string() + "'");
    nlohmann::json sidecar = meta;
    sidecar["format"] = "asdbench-scorer";
    sidecar["version"] = kVersion;
    sidecar["blocks"] = directory;
    std::ofstream js(path.string() + ".json", std::ios::binary | std::ios::trunc);
    js << sidecar.dump(2) << '\n';
  }

  static ScorerArchive load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::missing_artifact, "scorer '" + path.string() + "' not found");
    std::ifstream js(path.string() + ".json", std::ios::binary);
    if (!js) throw Error(ErrorCode::missing_artifact, "scorer sidecar '" + path.string() + ".json' not found");
    ScorerArchive ar;
    try {
      ar.meta = nlohmann::json::parse(js);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse, "scorer sidecar '" + path.string() + ".json': " + e.what());
    }
    binary::expect_magic(is, "ASDS", "scorer file");
    const std::uint32_t version = binary::read_u32(is);
    if (version != kVersion) throw Error(ErrorCode::io, "scorer file: unsupported version " + std::to_string(version));
    const std::uint32_t count = binary::read_u32(is);
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint32_t len = binary::read_u32(is);
      std::string name(len, '\0');
      if (!is.read(name.data(), len)) throw Error(ErrorCode::io, "scorer file: truncated block name");
      const auto type = static_cast<BlockType>(binary::read_u32(is));
      const std::uint64_t size = binary::read_u64(is);
      std::string bytes(size, '\0');
      if (!is.read(bytes.data(), static_cast<std::streamsize>(size))) throw Error(ErrorCode::io, "scorer file: truncated block");
      ar.blocks_[name] = {type, std::move(bytes)};
    }
    return ar;
  }

 private:
  struct Block {
    BlockType type;
    std::string bytes;
  };

  const std::string& block(const std::string& name, BlockType type) const {
    const auto it = blocks_.find(name);
    if (it == blocks_.end()) throw Error(ErrorCode::io, "scorer file: missing block '" + name + "'");
    if (it->second.type != type) throw Error(ErrorCode::io, "scorer file: block '" + name + "' has the wrong type");
    return it->second.bytes;
  }

  std::map<std::string, Block> blocks_;
};

/// Contract shared by every detector: fit on normal training clips, then map
/// a clip to one finite anomaly score (larger means more anomalous).
///
/// fit() mutates and must be serialized per scorer; score() is const and may
/// be called concurrently once fitted.
class AnomalyScorer {
 public:
  virtual ~AnomalyScorer() = default;

  virtual DetectorKind kind() const = 0;
  virtual void fit(std::span<const ClipFeatures> clips) = 0;
  virtual double score(const ClipFeatures& clip) const = 0;

  /// Stores parameters under `prefix` in `ar` and returns the description
  /// that load() expects back.
  virtual nlohmann::json save(ScorerArchive& ar, const std::string& prefix) const = 0;
  virtual void load(const ScorerArchive& ar, const std::string& prefix, const nlohmann::json& meta) = 0;

  bool fitted() const { return fitted_; }
  const std::string& machine_type() const { return machine_type_; }
  void set_machine_type(std::string m) { machine_type_ = std::move(m); }

 protected:
  void require_fitted(std::string_view op) const {
    if (!fitted_) {
      throw Error(ErrorCode::state, std::string(op) + ": " + std::string(to_string(kind())) + " scorer is not fitted");
    }
  }
  static double require_finite(double s, std::string_view what) {
    if (!std::isfinite(s)) throw Error(ErrorCode::state, std::string(what) + ": non-finite score");
    return s;
  }

  bool fitted_ = false;
  std::string machine_type_;
};

}  // namespace asdbench::detectors
