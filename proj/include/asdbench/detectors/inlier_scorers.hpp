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

#include <string>

#include "asdbench/detectors/inlier.hpp"
#include "asdbench/detectors/knn.hpp"
#include "asdbench/detectors/scorer.hpp"

namespace asdbench::detectors {

struct GmmScorerConfig {
  GmmFitOptions gmm{};     // components default 8 on raw log-mel frames
  int frame_stride = 1;    // keep every n-th training frame
  FitOptions fit{};
};

/// GMM density of raw log-mel frames; score = mean per-frame NLL.
class GmmScorer final : public AnomalyScorer {
 public:
  explicit GmmScorer(GmmScorerConfig config = {}) : config_(config) {}

  DetectorKind kind() const override { return DetectorKind::gmm; }
  const DomainInlierModel& model() const { return model_; }

  void fit(std::span<const ClipFeatures> clips) override {
    const int stride = std::max(1, config_.frame_stride);
    auto frames = [stride](const ClipFeatures& c) -> RowMatrix {
      const RowMatrix& f = c.frames();
      RowMatrix out((f.rows() + stride - 1) / stride, f.cols());
      for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) = f.row(r * stride);
      return out;
    };
    model_.fit(domain_training_data(clips, config_.fit, frames), ImConfig{ImKind::gmm, config_.gmm, 1});
    fitted_ = true;
  }

  double score(const ClipFeatures& clip) const override {
    require_fitted("gmm_score");
    return require_finite(model_.score(clip.frames(), clip.domain), "gmm_score");
  }

  nlohmann::json save(ScorerArchive& ar, const std::string& prefix) const override {
    require_fitted("save");
    return {{"kind", "gmm"},
            {"frame_stride", config_.frame_stride},
            {"adapt", config_.fit.adapt},
            {"pool_target", config_.fit.pool_target},
            {"model", model_.save(ar, prefix + "gmm/")}};
  }

  void load(const ScorerArchive& ar, const std::string& prefix, const nlohmann::json& meta) override {
    config_.frame_stride = meta.at("frame_stride");
    config_.fit.adapt = meta.at("adapt");
    config_.fit.pool_target = meta.at("pool_target");
    model_.load(ar, prefix + "gmm/", meta.at("model"));
    fitted_ = true;
  }

 private:
  GmmScorerConfig config_;
  DomainInlierModel model_;
};

struct KnnScorerConfig {
  int k = 3;
  FitOptions fit{};
};

/// Nearest-neighbour distance between time-averaged log-mel vectors.
class KnnScorer final : public AnomalyScorer {
 public:
  explicit KnnScorer(KnnScorerConfig config = {}) : config_(config) {}

  DetectorKind kind() const override { return DetectorKind::knn; }
  const KnnBank& bank() const { return bank_; }

  void fit(std::span<const ClipFeatures> clips) override {
    bank_.k = config_.k;
    bank_.banks = domain_training_data(clips, config_.fit, [](const ClipFeatures& c) { return clip_summary(*c.logmel); });
    if (bank_.empty()) throw Error(ErrorCode::validation, "knn: no training clips");
    fitted_ = true;
  }

  double score(const ClipFeatures& clip) const override {
    require_fitted("knn_score");
    return require_finite(knn_score(bank_, clip_summary(*clip.logmel), clip.domain), "knn_score");
  }

  nlohmann::json save(ScorerArchive& ar, const std::string& prefix) const override {
    require_fitted("save");
    nlohmann::json domains = nlohmann::json::array();
    for (const auto& [d, m] : bank_.banks) {
      domains.push_back(to_string(d));
      ar.put_matrix(prefix + "knn/" + std::string(to_string(d)), m);
    }
    return {{"kind", "knn"},
            {"k", config_.k},
            {"adapt", config_.fit.adapt},
            {"pool_target", config_.fit.pool_target},
            {"domains", domains}};
  }

  void load(const ScorerArchive& ar, const std::string& prefix, const nlohmann::json& meta) override {
    config_.k = meta.at("k");
    config_.fit.adapt = meta.at("adapt");
    config_.fit.pool_target = meta.at("pool_target");
    bank_ = KnnBank{{}, config_.k};
    for (const auto& name : meta.at("domains")) {
      const auto d = parse_domain(name.get<std::string>());
      if (!d) throw Error(ErrorCode::parse, "knn: unknown domain in sidecar");
      bank_.banks[*d] = ar.get_matrix(prefix + "knn/" + name.get<std::string>());
    }
    fitted_ = true;
  }

 private:
  KnnScorerConfig config_;
  KnnBank bank_;
};

}  // namespace asdbench::detectors
