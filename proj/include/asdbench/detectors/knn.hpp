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

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "asdbench/corpus/types.hpp"
#include "asdbench/error.hpp"
#include "asdbench/matrix.hpp"

namespace asdbench::detectors {

/// Mean Euclidean distance from each query row to its k nearest bank rows,
/// averaged over query rows. k is capped at the bank size.
inline double knn_mean_distance(const RowMatrix& bank, const RowMatrix& queries, int k) {
  if (bank.rows() == 0) throw Error(ErrorCode::state, "knn: empty bank");
  if (queries.rows() == 0) throw Error(ErrorCode::dimension, "knn: no query rows");
  if (bank.cols() != queries.cols()) throw Error(ErrorCode::dimension, "knn: query width differs from bank width");
  if (k < 1) throw Error(ErrorCode::usage, "knn: k must be >= 1");
  const auto kk = static_cast<std::size_t>(std::min<Eigen::Index>(k, bank.rows()));
  std::vector<double> dist(static_cast<std::size_t>(bank.rows()));
  double total = 0.0;
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    const Eigen::VectorXd d2 = (bank.rowwise() - queries.row(q)).rowwise().squaredNorm();
    for (Eigen::Index i = 0; i < bank.rows(); ++i) dist[static_cast<std::size_t>(i)] = std::sqrt(d2[i]);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    double s = 0.0;
    for (std::size_t i = 0; i < kk; ++i) s += dist[i];
    total += s / static_cast<double>(kk);
  }
  return total / static_cast<double>(queries.rows());
}

/// Stored normal feature vectors, one matrix per domain.
struct KnnBank {
  std::map<Domain, RowMatrix> banks;
  int k = 1;

  bool empty() const {
    return std::all_of(banks.begin(), banks.end(), [](const auto& kv) { return kv.second.rows() == 0; });
  }
};

/// With a hint, searches that domain's bank (when one exists); otherwise takes
/// the minimum over the per-domain scores.
inline double knn_score(const KnnBank& bank, const RowMatrix& features, std::optional<Domain> domain_hint) {
  if (bank.empty()) throw Error(ErrorCode::state, "knn_score: empty bank");
  if (domain_hint) {
    const auto it = bank.banks.find(*domain_hint);
    if (it != bank.banks.end() && it->second.rows() > 0) return knn_mean_distance(it->second, features, bank.k);
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [d, m] : bank.banks) {
    if (m.rows() > 0) best = std::min(best, knn_mean_distance(m, features, bank.k));
  }
  return best;
}

}  // namespace asdbench::detectors
