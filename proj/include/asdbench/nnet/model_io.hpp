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

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "asdbench/binary_io.hpp"
#include "asdbench/nnet/dense_net.hpp"
#include "asdbench/nnet/train.hpp"

namespace asdbench::nnet {

// Model file: "ASDN", u32 version, u32 layer count, then per layer
// u32 in, u32 out, u32 activation, out*in row-major f64 weights, out f64 biases.
inline constexpr std::uint32_t kModelVersion = 1;

inline void write_net(std::ostream& os, const DenseNet& net) {
  binary::write_magic(os, "ASDN");
  binary::write_u32(os, kModelVersion);
  binary::write_u32(os, static_cast<std::uint32_t>(net.layer_count()));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const LayerInfo& info = net.layer(l);
    binary::write_u32(os, static_cast<std::uint32_t>(info.in));
    binary::write_u32(os, static_cast<std::uint32_t>(info.out));
    binary::write_u32(os, static_cast<std::uint32_t>(info.activation));
    const auto w = net.weight(l);
    for (Eigen::Index i = 0; i < w.size(); ++i) binary::write_f64(os, w.data()[i]);
    const auto b = net.bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) binary::write_f64(os, b[i]);
  }
}

inline DenseNet read_net(std::istream& is) {
  binary::expect_magic(is, "ASDN", "model file");
  const std::uint32_t version = binary::read_u32(is);
  if (version != kModelVersion) throw Error(ErrorCode::io, "model file: unsupported version " + std::to_string(version));
  const std::uint32_t layers = binary::read_u32(is);
  if (layers == 0 || layers > 1024) throw Error(ErrorCode::io, "model file: implausible layer count");
  struct Raw {
    std::uint32_t in, out, act;
    std::vector<double> values;
  };
  std::vector<Raw> raw(layers);
  for (auto& r : raw) {
    r.in = binary::read_u32(is);
    r.out = binary::read_u32(is);
    r.act = binary::read_u32(is);
    if (r.act > static_cast<std::uint32_t>(Activation::softmax)) throw Error(ErrorCode::io, "model file: bad activation");
    r.values.resize(static_cast<std::size_t>(r.in) * r.out + r.out);
    for (double& v : r.values) v = binary::read_f64(is);
  }
  std::vector<int> dims{static_cast<int>(raw.front().in)};
  std::vector<Activation> acts;
  for (const auto& r : raw) {
    if (static_cast<int>(r.in) != dims.back()) throw Error(ErrorCode::io, "model file: layer widths do not chain");
    dims.push_back(static_cast<int>(r.out));
    acts.push_back(static_cast<Activation>(r.act));
  }
  DenseNet net(dims, acts);
  for (std::size_t l = 0; l < raw.size(); ++l) {
    std::copy(raw[l].values.begin(), raw[l].values.end(), net.params().data() + net.layer(l).offset);
  }
  if (!net.all_finite()) throw Error(ErrorCode::io, "model file: non-finite parameters");
  return net;
}

inline nlohmann::json architecture_json(const DenseNet& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& info : net.layers()) {
    layers.push_back({{"in", info.in}, {"out", info.out}, {"activation", to_string(info.activation)}});
  }
  return {{"format", "asdbench-densenet"}, {"version", kModelVersion}, {"layers", layers},
          {"parameters", net.params().size()}};
}

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs}, {"batch_size", c.batch_size}, {"lr", c.lr}, {"seed", c.seed}, {"shuffle", c.shuffle}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c = {}) {
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.seed = j.value("seed", c.seed);
  c.shuffle = j.value("shuffle", c.shuffle);
  return c;
}

/// Writes `path` (binary weights) and `path.json` (architecture, training
/// config, loss curve).
inline void save_model(const std::filesystem::path& path, const DenseNet& net, const TrainConfig& config,
                       const TrainResult& result) {
  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::io, "cannot write model '" + path.string() + "'");
    write_net(os, net);
  }
  nlohmann::json sidecar = architecture_json(net);
  sidecar["train"] = to_json(config);
  sidecar["loss_curve"] = result.loss_curve;
  std::ofstream js(path.string() + ".json", std::ios::binary | std::ios::trunc);
  js << sidecar.dump(2) << '\n';
}

inline DenseNet load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::missing_artifact, "model '" + path.string() + "' not found");
  return read_net(is);
}

}  // namespace asdbench::nnet
