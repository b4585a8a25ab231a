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
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asdbench/detectors/autoencoder.hpp"
#include "asdbench/detectors/ensemble.hpp"
#include "asdbench/detectors/inlier_scorers.hpp"
#include "asdbench/detectors/outlier_exposure.hpp"
#include "asdbench/detectors/serial.hpp"

namespace asdbench::detectors {

/// Settings for every detector kind; make_scorer() picks the relevant part.
struct DetectorConfig {
  AeConfig ae{};
  OeConfig oe{};
  GmmScorerConfig gmm{};
  KnnScorerConfig knn{};
  SerialConfig serial{};
  std::vector<DetectorKind> members{DetectorKind::oe, DetectorKind::gmm};
  FitOptions fit{};
  std::uint64_t seed = 0;
};

inline std::unique_ptr<AnomalyScorer> make_scorer(DetectorKind kind, const DetectorConfig& cfg) {
  const std::uint64_t seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(kind)});
  switch (kind) {
    case DetectorKind::ae: {
      AeConfig c = cfg.ae;
      c.fit = cfg.fit;
      c.train.seed = seed;
      return std::make_unique<AeScorer>(c);
    }
    case DetectorKind::oe: {
      OeConfig c = cfg.oe;
      c.fit = cfg.fit;
      c.train.seed = seed;
      return std::make_unique<OeScorer>(c);
    }
    case DetectorKind::gmm: {
      GmmScorerConfig c = cfg.gmm;
      c.fit = cfg.fit;
      c.gmm.seed = seed;
      return std::make_unique<GmmScorer>(c);
    }
    case DetectorKind::knn: {
      KnnScorerConfig c = cfg.knn;
      c.fit = cfg.fit;
      return std::make_unique<KnnScorer>(c);
    }
    case DetectorKind::serial: {
      SerialConfig c = cfg.serial;
      c.oe = cfg.oe;
      c.oe.train.seed = seed;
      c.im.gmm.seed = derive_seed(seed, {1});
      c.fit = cfg.fit;
      return std::make_unique<SerialScorer>(c);
    }
    case DetectorKind::ensemble:
      return std::make_unique<EnsembleScorer>(cfg.members, [cfg](DetectorKind k) { return make_scorer(k, cfg); });
  }
  throw Error(ErrorCode::usage, "unknown detector kind");
}

inline void save_scorer(const std::filesystem::path& path, const AnomalyScorer& scorer) {
  ScorerArchive ar;
  ar.meta = scorer.save(ar, "");
  ar.meta["machine"] = scorer.machine_type();
  ar.save(path);
}

inline std::unique_ptr<AnomalyScorer> load_scorer(const std::filesystem::path& path) {
  const ScorerArchive ar = ScorerArchive::load(path);
  const auto kind = parse_detector_kind(ar.meta.value("kind", ""));
  if (!kind) throw Error(ErrorCode::parse, "scorer '" + path.string() + "': unknown kind");
  auto scorer = make_scorer(*kind, DetectorConfig{});
  scorer->set_machine_type(ar.meta.value("machine", ""));
  scorer->load(ar, "", ar.meta);
  return scorer;
}

namespace detail {
template <typename T>
void take(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
inline void take_train(const nlohmann::json& j, nnet::TrainConfig& t) {
  take(j, "epochs", t.epochs);
  take(j, "batch_size", t.batch_size);
  take(j, "lr", t.lr);
}
}  // namespace detail

/// Applies the keys present in `j` on top of `cfg`.
inline DetectorConfig detector_config_from_json(const nlohmann::json& j, DetectorConfig cfg = {}) {
  using detail::take;
  try {
    if (j.contains("ae")) {
      const auto& a = j.at("ae");
      detail::take_train(a, cfg.ae.train);
      take(a, "frame_stride", cfg.ae.frame_stride);
      take(a, "context", cfg.ae.context);
      take(a, "hidden", cfg.ae.hidden);
      take(a, "hidden_layers", cfg.ae.hidden_layers);
      take(a, "bottleneck", cfg.ae.bottleneck);
    }
    if (j.contains("oe")) {
      const auto& o = j.at("oe");
      detail::take_train(o, cfg.oe.train);
      take(o, "frames_per_image", cfg.oe.frames_per_image);
      take(o, "shift", cfg.oe.shift);
      take(o, "hidden1", cfg.oe.hidden1);
      take(o, "hidden2", cfg.oe.hidden2);
    }
    if (j.contains("gmm")) {
      const auto& g = j.at("gmm");
      take(g, "components", cfg.gmm.gmm.components);
      take(g, "max_iter", cfg.gmm.gmm.max_iter);
      take(g, "tol", cfg.gmm.gmm.tol);
      take(g, "var_floor", cfg.gmm.gmm.var_floor);
      take(g, "frame_stride", cfg.gmm.frame_stride);
    }
    if (j.contains("knn")) take(j.at("knn"), "k", cfg.knn.k);
    if (j.contains("serial")) {
      const auto& s = j.at("serial");
      if (s.contains("im")) cfg.serial.im.kind = s.at("im").get<std::string>() == "knn" ? ImKind::knn : ImKind::gmm;
      take(s, "components", cfg.serial.im.gmm.components);
      take(s, "k", cfg.serial.im.k);
    }
    if (j.contains("members")) {
      cfg.members.clear();
      for (const auto& m : j.at("members")) {
        const auto k = parse_detector_kind(m.get<std::string>());
        if (!k) throw Error(ErrorCode::usage, "unknown ensemble member '" + m.get<std::string>() + "'");
        cfg.members.push_back(*k);
      }
    }
    take(j, "adapt", cfg.fit.adapt);
    take(j, "pool_target", cfg.fit.pool_target);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::usage, std::string("detector config: ") + e.what());
  }
  return cfg;
}

inline nlohmann::json to_json(const DetectorConfig& cfg) {
  nlohmann::json members = nlohmann::json::array();
  for (auto k : cfg.members) members.push_back(to_string(k));
  return {
      {"ae",
       {{"epochs", cfg.ae.train.epochs}, {"batch_size", cfg.ae.train.batch_size}, {"lr", cfg.ae.train.lr},
        {"frame_stride", cfg.ae.frame_stride}, {"context", cfg.ae.context}, {"hidden", cfg.ae.hidden},
        {"hidden_layers", cfg.ae.hidden_layers}, {"bottleneck", cfg.ae.bottleneck}}},
      {"oe",
       {{"epochs", cfg.oe.train.epochs}, {"batch_size", cfg.oe.train.batch_size}, {"lr", cfg.oe.train.lr},
        {"frames_per_image", cfg.oe.frames_per_image}, {"shift", cfg.oe.shift}, {"hidden1", cfg.oe.hidden1},
        {"hidden2", cfg.oe.hidden2}}},
      {"gmm",
       {{"components", cfg.gmm.gmm.components}, {"max_iter", cfg.gmm.gmm.max_iter}, {"tol", cfg.gmm.gmm.tol},
        {"var_floor", cfg.gmm.gmm.var_floor}, {"frame_stride", cfg.gmm.frame_stride}}},
      {"knn", {{"k", cfg.knn.k}}},
      {"serial", {{"im", to_string(cfg.serial.im.kind)}, {"components", cfg.serial.im.gmm.components}, {"k", cfg.serial.im.k}}},
      {"members", members},
      {"adapt", cfg.fit.adapt},
      {"pool_target", cfg.fit.pool_target},
  };
}

}  // namespace asdbench::detectors
