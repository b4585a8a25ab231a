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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asdbench/corpus/dataset.hpp"
#include "asdbench/detectors/factory.hpp"

namespace asdbench::cli {

namespace fs = std::filesystem;

enum class Command { synth, train, score, eval };

/// Fully resolved settings for one command.
struct RunConfig {
  Command command = Command::synth;
  fs::path data;
  fs::path models = "models";
  fs::path scores = "scores";
  fs::path out;  // eval output directory; defaults to the score directory
  detectors::DetectorKind detector = detectors::DetectorKind::ae;
  std::vector<std::string> machines;  // empty means all
  std::uint64_t seed = 0;
  double p = 0.1;
  int trials = 1;
  bool force = false;
  CorpusConfig corpus{};
  detectors::DetectorConfig detectors{};

  void validate() const {
    if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::usage, "--p must lie in (0, 1]");
    if (trials < 1) throw Error(ErrorCode::usage, "--trials must be at least 1");
    if (command != Command::synth && data.empty()) throw Error(ErrorCode::usage, "--data is required");
  }
};

/// Values given on the command line; unset fields fall back to the config
/// file, then to the environment (seed only), then to defaults.
struct Overrides {
  std::optional<std::string> data, models, scores, out, detector, members;
  std::vector<std::string> machines;
  std::optional<std::uint64_t> seed;
  std::optional<double> p;
  std::optional<int> trials;
  std::optional<int> n_machines, sections, source_train_clips, target_train_clips, test_clips;
  bool force = false;
  bool adapt = false;
  bool identical_sections = false;
  std::optional<std::string> config_file;
};

inline nlohmann::json read_config_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::missing_artifact, "config file '" + path.string() + "' not found");
  try {
    auto j = nlohmann::json::parse(is);
    if (!j.is_object()) throw Error(ErrorCode::usage, "config file '" + path.string() + "' must hold a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::usage, "config file '" + path.string() + "': " + e.what());
  }
}

inline std::vector<detectors::DetectorKind> parse_members(const std::string& list) {
  std::vector<detectors::DetectorKind> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto end = std::min(list.find(',', start), list.size());
    const std::string name = list.substr(start, end - start);
    const auto kind = detectors::parse_detector_kind(name);
    if (!kind || *kind == detectors::DetectorKind::ensemble) {
      throw Error(ErrorCode::usage, "invalid ensemble member '" + name + "'");
    }
    out.push_back(*kind);
    start = end + 1;
  }
  return out;
}

inline detectors::DetectorKind parse_kind_or_throw(const std::string& name) {
  const auto kind = detectors::parse_detector_kind(name);
  if (!kind) throw Error(ErrorCode::usage, "unknown detector '" + name + "' (expected ae, oe, gmm, knn, serial, ensemble)");
  return *kind;
}

inline std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("ASDBENCH_SEED");
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0' || raw[0] == '-') throw Error(ErrorCode::usage, std::string("ASDBENCH_SEED is not an unsigned integer: ") + raw);
  return v;
}

/// Merges flags > config file > environment > defaults.
inline RunConfig resolve(Command command, const Overrides& o) {
  RunConfig cfg;
  cfg.command = command;
  nlohmann::json file = nlohmann::json::object();
  if (o.config_file) file = read_config_file(*o.config_file);

  try {
    auto str = [&](const char* key) -> std::optional<std::string> {
      if (file.contains(key)) return file.at(key).get<std::string>();
      return std::nullopt;
    };
    if (auto v = str("data")) cfg.data = *v;
    if (auto v = str("models")) cfg.models = *v;
    if (auto v = str("scores")) cfg.scores = *v;
    if (auto v = str("out")) cfg.out = *v;
    if (auto v = str("detector")) cfg.detector = parse_kind_or_throw(*v);
    if (file.contains("machines")) cfg.machines = file.at("machines").get<std::vector<std::string>>();
    if (file.contains("p")) cfg.p = file.at("p").get<double>();
    if (file.contains("trials")) cfg.trials = file.at("trials").get<int>();
    if (file.contains("force")) cfg.force = file.at("force").get<bool>();
    cfg.detectors = detectors::detector_config_from_json(file, cfg.detectors);
    if (file.contains("synth")) {
      const auto& s = file.at("synth");
      detectors::detail::take(s, "machines", cfg.corpus.machines);
      detectors::detail::take(s, "sections", cfg.corpus.sections_per_machine);
      detectors::detail::take(s, "source_train_clips", cfg.corpus.source_train_clips);
      detectors::detail::take(s, "target_train_clips", cfg.corpus.target_train_clips);
      detectors::detail::take(s, "test_clips", cfg.corpus.test_clips);
      detectors::detail::take(s, "identical_sections", cfg.corpus.identical_sections);
      detectors::detail::take(s, "fundamental_ratio", cfg.corpus.shift.fundamental_ratio);
      detectors::detail::take(s, "snr_delta_db", cfg.corpus.shift.snr_delta_db);
    }
    if (auto env = env_seed()) cfg.seed = *env;
    if (file.contains("seed")) cfg.seed = file.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::usage, std::string("config file: ") + e.what());
  }

  if (o.data) cfg.data = *o.data;
  if (o.models) cfg.models = *o.models;
  if (o.scores) cfg.scores = *o.scores;
  if (o.out) cfg.out = *o.out;
  if (o.detector) cfg.detector = parse_kind_or_throw(*o.detector);
  if (o.members) cfg.detectors.members = parse_members(*o.members);
  if (!o.machines.empty()) cfg.machines = o.machines;
  if (o.seed) cfg.seed = *o.seed;
  if (o.p) cfg.p = *o.p;
  if (o.trials) cfg.trials = *o.trials;
  if (o.force) cfg.force = true;
  if (o.adapt) cfg.detectors.fit.adapt = true;
  if (o.n_machines) cfg.corpus.machines = *o.n_machines;
  if (o.sections) cfg.corpus.sections_per_machine = *o.sections;
  if (o.source_train_clips) cfg.corpus.source_train_clips = *o.source_train_clips;
  if (o.target_train_clips) cfg.corpus.target_train_clips = *o.target_train_clips;
  if (o.test_clips) cfg.corpus.test_clips = *o.test_clips;
  if (o.identical_sections) cfg.corpus.identical_sections = true;

  cfg.corpus.root = cfg.data;
  cfg.corpus.seed = cfg.seed;
  cfg.corpus.force = cfg.force;
  cfg.detectors.seed = cfg.seed;
  if (cfg.out.empty()) cfg.out = cfg.scores;
  cfg.validate();
  return cfg;
}

}  // namespace asdbench::cli
