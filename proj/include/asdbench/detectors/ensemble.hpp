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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "asdbench/detectors/scorer.hpp"
#include "asdbench/log.hpp"

namespace asdbench::detectors {

struct MemberCalibration {
  double mean = 0.0;
  double std = 1.0;
  bool active = true;
};

/// Members plus the z-score statistics of each on source-domain training
/// normals. Members whose scores do not vary are dropped.
struct EnsembleSpec {
  std::vector<std::shared_ptr<const AnomalyScorer>> members;
  std::vector<MemberCalibration> calibration;

  std::size_t active_count() const {
    std::size_t n = 0;
    for (const auto& c : calibration) n += c.active ? 1 : 0;
    return n;
  }
};

/// Calibration statistics from per-member score vectors (population std).
inline std::vector<MemberCalibration> calibration_from_scores(const std::vector<std::vector<double>>& scores) {
  std::vector<MemberCalibration> out;
  for (std::size_t m = 0; m < scores.size(); ++m) {
    const auto& s = scores[m];
    MemberCalibration c;
    if (s.empty()) {
      c.active = false;
    } else {
      double mean = 0.0;
      for (double v : s) mean += v;
      mean /= static_cast<double>(s.size());
      double var = 0.0;
      for (double v : s) var += (v - mean) * (v - mean);
      c.mean = mean;
      c.std = std::sqrt(var / static_cast<double>(s.size()));
      c.active = std::isfinite(c.std) && c.std > 0.0;
    }
    if (!c.active) log::warn("ensemble: member " + std::to_string(m) + " has zero score spread on calibration data; dropped");
    out.push_back(c);
  }
  return out;
}

/// Scores every member on the source-domain clips of `clips`.
inline void calibrate(EnsembleSpec& spec, std::span<const ClipFeatures> clips) {
  std::vector<std::vector<double>> scores(spec.members.size());
  for (const auto& clip : clips) {
    if (clip.domain && *clip.domain != Domain::source) continue;
    for (std::size_t m = 0; m < spec.members.size(); ++m) scores[m].push_back(spec.members[m]->score(clip));
  }
  spec.calibration = calibration_from_scores(scores);
  if (spec.active_count() == 0) throw Error(ErrorCode::validation, "ensemble: every member was dropped during calibration");
}

/// Mean over active members of (score - mean) / std.
inline double ensemble_score(const EnsembleSpec& spec, const ClipFeatures& clip) {
  if (spec.calibration.size() != spec.members.size()) throw Error(ErrorCode::state, "ensemble: not calibrated");
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t m = 0; m < spec.members.size(); ++m) {
    const auto& c = spec.calibration[m];
    if (!c.active) continue;
    total += (spec.members[m]->score(clip) - c.mean) / c.std;
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::validation, "ensemble: no active members");
  return total / static_cast<double>(used);
}

/// Parallel hybrid: calibrated mean of member z-scores.
class EnsembleScorer final : public AnomalyScorer {
 public:
  using MemberFactory = std::function<std::unique_ptr<AnomalyScorer>(DetectorKind)>;

  EnsembleScorer(std::vector<DetectorKind> kinds, MemberFactory factory)
      : kinds_(std::move(kinds)), factory_(std::move(factory)) {
    if (kinds_.empty()) throw Error(ErrorCode::usage, "ensemble: needs at least one member");
    for (auto k : kinds_) {
      if (k == DetectorKind::ensemble) throw Error(ErrorCode::usage, "ensemble: members cannot be ensembles");
    }
  }

  DetectorKind kind() const override { return DetectorKind::ensemble; }
  const EnsembleSpec& spec() const { return spec_; }
  const std::vector<DetectorKind>& member_kinds() const { return kinds_; }

  void fit(std::span<const ClipFeatures> clips) override {
    spec_ = {};
    for (auto k : kinds_) {
      auto member = factory_(k);
      member->set_machine_type(machine_type_);
      member->fit(clips);
      spec_.members.push_back(std::move(member));
    }
    calibrate(spec_, clips);
    fitted_ = true;
  }

  double score(const ClipFeatures& clip) const override {
    require_fitted("ensemble_score");
    return require_finite(ensemble_score(spec_, clip), "ensemble_score");
  }

  nlohmann::json save(ScorerArchive& ar, const std::string& prefix) const override {
    require_fitted("save");
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t m = 0; m < spec_.members.size(); ++m) {
      const auto& c = spec_.calibration[m];
      members.push_back({{"scorer", spec_.members[m]->save(ar, prefix + "member" + std::to_string(m) + "/")},
                         {"calibration", {{"mean", c.mean}, {"std", c.std}, {"active", c.active}}}});
    }
    return {{"kind", "ensemble"}, {"combination", "mean_z_score"}, {"members", members}};
  }

  void load(const ScorerArchive& ar, const std::string& prefix, const nlohmann::json& meta) override {
    spec_ = {};
    kinds_.clear();
    std::size_t m = 0;
    for (const auto& item : meta.at("members")) {
      const auto kind = parse_detector_kind(item.at("scorer").at("kind").get<std::string>());
      if (!kind || *kind == DetectorKind::ensemble) throw Error(ErrorCode::parse, "ensemble: bad member kind");
      auto member = factory_(*kind);
      member->load(ar, prefix + "member" + std::to_string(m++) + "/", item.at("scorer"));
      member->set_machine_type(machine_type_);
      kinds_.push_back(*kind);
      spec_.members.push_back(std::move(member));
      const auto& c = item.at("calibration");
      spec_.calibration.push_back({c.at("mean"), c.at("std"), c.at("active")});
    }
    fitted_ = true;
  }

 private:
  std::vector<DetectorKind> kinds_;
  MemberFactory factory_;
  EnsembleSpec spec_;
};

}  // namespace asdbench::detectors
