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

#include <memory>
#include <string>

#include "asdbench/detectors/inlier.hpp"
#include "asdbench/detectors/outlier_exposure.hpp"

namespace asdbench::detectors {

struct SerialConfig {
  OeConfig oe{};
  ImConfig im{ImKind::gmm, GmmFitOptions{2, 200, 1e-6, 1e-6, 0}, 3};
  FitOptions fit{};
};

/// Serial hybrid: inlier models fitted on penultimate-layer embeddings of a
/// frozen section classifier. Only the inlier models see target-domain data
/// when adapting.
class SerialScorer final : public AnomalyScorer {
 public:
  explicit SerialScorer(SerialConfig config = {}) : config_(config) {}

  DetectorKind kind() const override { return DetectorKind::serial; }
  const OeScorer& extractor() const {
    if (!extractor_) throw Error(ErrorCode::state, "serial: no feature extractor");
    return *extractor_;
  }
  const DomainInlierModel& inlier_model() const { return im_; }

  void fit(std::span<const ClipFeatures> clips) override {
    OeConfig oe = config_.oe;
    oe.fit = config_.fit;
    auto extractor = std::make_shared<OeScorer>(oe);
    extractor->set_machine_type(machine_type_);
    extractor->fit(clips);
    fit_inlier(std::move(extractor), clips);
  }

  /// Fits only the inlier models on top of an already trained classifier.
  void fit_inlier(std::shared_ptr<const OeScorer> extractor, std::span<const ClipFeatures> clips) {
    if (!extractor || !extractor->fitted()) throw Error(ErrorCode::state, "serial_fit: feature extractor is not fitted");
    extractor_ = std::move(extractor);
    const OeScorer& oe = *extractor_;
    im_.fit(domain_training_data(clips, config_.fit, [&oe](const ClipFeatures& c) { return oe.embed(oe.windows(c)); }),
            config_.im);
    fitted_ = true;
  }

  double score(const ClipFeatures& clip) const override {
    require_fitted("serial_score");
    return require_finite(im_.score(extractor_->embed(extractor_->windows(clip)), clip.domain), "serial_score");
  }

  nlohmann::json save(ScorerArchive& ar, const std::string& prefix) const override {
    require_fitted("save");
    return {{"kind", "serial"},
            {"adapt", config_.fit.adapt},
            {"pool_target", config_.fit.pool_target},
            {"extractor", extractor_->save(ar, prefix + "extractor/")},
            {"inlier", im_.save(ar, prefix + "inlier/")}};
  }

  void load(const ScorerArchive& ar, const std::string& prefix, const nlohmann::json& meta) override {
    config_.fit.adapt = meta.at("adapt");
    config_.fit.pool_target = meta.at("pool_target");
    auto extractor = std::make_shared<OeScorer>();
    extractor->load(ar, prefix + "extractor/", meta.at("extractor"));
    extractor_ = std::move(extractor);
    im_.load(ar, prefix + "inlier/", meta.at("inlier"));
    fitted_ = true;
  }

 private:
  SerialConfig config_;
  std::shared_ptr<const OeScorer> extractor_;
  DomainInlierModel im_;
};

inline SerialScorer serial_fit(std::shared_ptr<const OeScorer> extractor, std::span<const ClipFeatures> clips,
                               SerialConfig config = {}) {
  SerialScorer scorer(config);
  scorer.fit_inlier(std::move(extractor), clips);
  return scorer;
}

}  // namespace asdbench::detectors
