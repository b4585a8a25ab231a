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

#include <limits>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "asdbench/detectors/gmm.hpp"
#include "asdbench/detectors/knn.hpp"
#include "asdbench/detectors/scorer.hpp"
#include "asdbench/log.hpp"

namespace asdbench::detectors {

enum class ImKind { gmm, knn };

inline std::string_view to_string(ImKind k) { return k == ImKind::gmm ? "gmm" : "knn"; }

struct ImConfig {
  ImKind kind = ImKind::gmm;
  GmmFitOptions gmm{};
  int k = 3;
};

/// Inlier model with one density (GMM) or memory (kNN) model per domain.
/// A GMM request on fewer samples than components degrades to kNN.
class DomainInlierModel {
 public:
  struct Entry {
    ImKind kind = ImKind::knn;
    GmmModel gmm;
    RowMatrix bank;
  };

  void fit(const std::map<Domain, RowMatrix>& data, const ImConfig& config) {
    config_ = config;
    entries_.clear();
    for (const auto& [domain, x] : data) {
      if (x.rows() == 0) continue;
      Entry e;
      if (config.kind == ImKind::gmm && x.rows() >= config.gmm.components) {
        e.kind = ImKind::gmm;
        GmmFitOptions opts = config.gmm;
        opts.seed = derive_seed(config.gmm.seed, {static_cast<std::uint64_t>(domain)});
        e.gmm = gmm_fit(x, opts).model;
      } else {
        if (config.kind == ImKind::gmm) {
          log::warn("inlier model: " + std::string(to_string(domain)) + " domain has " + std::to_string(x.rows()) +
                    " samples < " + std::to_string(config.gmm.components) + " GMM components; using kNN");
        }
        e.kind = ImKind::knn;
        e.bank = x;
      }
      entries_[domain] = std::move(e);
    }
    if (entries_.empty()) throw Error(ErrorCode::validation, "inlier model: no training features");
  }

  bool fitted() const { return !entries_.empty(); }
  const std::map<Domain, Entry>& entries() const { return entries_; }

  double score_domain(const Entry& e, const RowMatrix& features) const {
    return e.kind == ImKind::gmm ? gmm_score(e.gmm, features) : knn_mean_distance(e.bank, features, config_.k);
  }

  double score(const RowMatrix& features, std::optional<Domain> hint) const {
    if (entries_.empty()) throw Error(ErrorCode::state, "inlier model is not fitted");
    if (hint) {
      const auto it = entries_.find(*hint);
      if (it != entries_.end()) return score_domain(it->second, features);
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [d, e] : entries_) best = std::min(best, score_domain(e, features));
    return best;
  }

  nlohmann::json save(ScorerArchive& ar, const std::string& prefix) const {
    nlohmann::json meta = {{"kind", to_string(config_.kind)},
                           {"k", config_.k},
                           {"gmm_components", config_.gmm.components},
                           {"gmm_max_iter", config_.gmm.max_iter},
                           {"gmm_tol", config_.gmm.tol},
                           {"gmm_var_floor", config_.gmm.var_floor},
                           {"seed", config_.gmm.seed}};
    nlohmann::json domains = nlohmann::json::object();
    for (const auto& [d, e] : entries_) {
      const std::string base = prefix + std::string(to_string(d)) + "/";
      domains[std::string(to_string(d))] = to_string(e.kind);
      if (e.kind == ImKind::gmm) {
        ar.put_matrix(base + "weights", e.gmm.weights.transpose());
        ar.put_matrix(base + "means", e.gmm.means);
        ar.put_matrix(base + "variances", e.gmm.variances);
      } else {
        ar.put_matrix(base + "bank", e.bank);
      }
    }
    meta["domains"] = domains;
    return meta;
  }

  void load(const ScorerArchive& ar, const std::string& prefix, const nlohmann::json& meta) {
    config_.kind = meta.at("kind") == "gmm" ? ImKind::gmm : ImKind::knn;
    config_.k = meta.at("k");
    config_.gmm.components = meta.at("gmm_components");
    config_.gmm.max_iter = meta.at("gmm_max_iter");
    config_.gmm.tol = meta.at("gmm_tol");
    config_.gmm.var_floor = meta.at("gmm_var_floor");
    config_.gmm.seed = meta.at("seed");
    entries_.clear();
    for (const auto& [name, kind] : meta.at("domains").items()) {
      const auto domain = parse_domain(name);
      if (!domain) throw Error(ErrorCode::parse, "inlier model: unknown domain '" + name + "'");
      const std::string base = prefix + name + "/";
      Entry e;
      e.kind = kind == "gmm" ? ImKind::gmm : ImKind::knn;
      if (e.kind == ImKind::gmm) {
        e.gmm.weights = ar.get_matrix(base + "weights").row(0).transpose();
        e.gmm.means = ar.get_matrix(base + "means");
        e.gmm.variances = ar.get_matrix(base + "variances");
      } else {
        e.bank = ar.get_matrix(base + "bank");
      }
      entries_[*domain] = std::move(e);
    }
  }

 private:
  ImConfig config_;
  std::map<Domain, Entry> entries_;
};

/// Training matrices per domain under the fit options: either one pooled
/// model (stored under `source`) or separate source and target models.
template <typename Extract>
std::map<Domain, RowMatrix> domain_training_data(std::span<const ClipFeatures> clips, const FitOptions& opts,
                                                 Extract&& extract) {
  std::map<Domain, RowMatrix> out;
  if (opts.adapt) {
    for (Domain d : {Domain::source, Domain::target}) {
      auto subset = clips_in(clips, d);
      if (!subset.empty()) out[d] = stack_rows(subset, extract);
    }
  } else {
    out[Domain::source] = stack_rows(pooled_clips(clips, opts), extract);
  }
  return out;
}

}  // namespace asdbench::detectors
