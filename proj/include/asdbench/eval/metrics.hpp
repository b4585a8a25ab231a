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
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asdbench/error.hpp"

namespace asdbench::eval {

enum class Decision { normal, anomaly };

/// Anomalous iff the score strictly exceeds the threshold.
inline Decision decide(double score, double threshold) {
  return score > threshold ? Decision::anomaly : Decision::normal;
}

/// floor(p * n_neg); the small slack keeps products such as 0.1 * 30 from
/// flooring to 2 through representation error.
inline std::size_t pauc_normal_count(std::size_t n_neg, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::usage, "pAUC: p must be in (0, 1]");
  return static_cast<std::size_t>(std::floor(p * static_cast<double>(n_neg) + 1e-9));
}

namespace detail {

inline void check_scores(std::span<const double> normal, std::span<const double> anomaly, const char* what) {
  if (normal.empty() || anomaly.empty()) {
    throw Error(ErrorCode::undefined_metric, std::string(what) + ": needs at least one normal and one anomalous score");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(normal.begin(), normal.end(), finite) || !std::all_of(anomaly.begin(), anomaly.end(), finite)) {
    throw Error(ErrorCode::validation, std::string(what) + ": non-finite score");
  }
}

/// Number of (normal, anomaly) pairs with anomaly > normal; `sorted_normal`
/// must be ascending.
inline double count_pairs_above(const std::vector<double>& sorted_normal, std::span<const double> anomaly) {
  double pairs = 0.0;
  for (double a : anomaly) {
    pairs += static_cast<double>(std::lower_bound(sorted_normal.begin(), sorted_normal.end(), a) - sorted_normal.begin());
  }
  return pairs;
}

}  // namespace detail

/// Fraction of (normal, anomaly) pairs in which the anomaly scores strictly
/// higher; ties count zero.
inline double auc(std::span<const double> normal, std::span<const double> anomaly) {
  detail::check_scores(normal, anomaly, "AUC");
  std::vector<double> sorted(normal.begin(), normal.end());
  std::sort(sorted.begin(), sorted.end());
  return detail::count_pairs_above(sorted, anomaly) /
         (static_cast<double>(normal.size()) * static_cast<double>(anomaly.size()));
}

/// AUC restricted to the floor(p * N-) highest-scoring normal clips.
inline double pauc(std::span<const double> normal, std::span<const double> anomaly, double p = 0.1) {
  detail::check_scores(normal, anomaly, "pAUC");
  const std::size_t m = pauc_normal_count(normal.size(), p);
  if (m == 0) {
    throw Error(ErrorCode::undefined_metric, "pAUC: floor(p * N-) = 0 for p = " + std::to_string(p) +
                                                 ", N- = " + std::to_string(normal.size()));
  }
  std::vector<double> sorted(normal.begin(), normal.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  sorted.resize(m);
  std::reverse(sorted.begin(), sorted.end());
  return detail::count_pairs_above(sorted, anomaly) / (static_cast<double>(m) * static_cast<double>(anomaly.size()));
}

/// Reference evaluation by explicit double loop over the descending-sorted
/// normals: AUC when `p` is empty, pAUC otherwise. Quadratic; for tests and
/// audits.
inline double brute_force_auc(std::span<const double> normal, std::span<const double> anomaly,
                              std::optional<double> p = std::nullopt) {
  detail::check_scores(normal, anomaly, "brute-force AUC");
  std::vector<double> desc(normal.begin(), normal.end());
  std::sort(desc.begin(), desc.end(), std::greater<>());
  const std::size_t rows = p ? pauc_normal_count(desc.size(), *p) : desc.size();
  if (rows == 0) throw Error(ErrorCode::undefined_metric, "brute-force pAUC: floor(p * N-) = 0");
  double hits = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (double a : anomaly) {
      const double b = a - desc[i];
      hits += b > 0.0 ? 1.0 : 0.0;
    }
  }
  return hits / (static_cast<double>(rows) * static_cast<double>(anomaly.size()));
}

/// Harmonic mean of all AUC and pAUC values; 0 when any value is 0. Values
/// are summed in sorted order so the result does not depend on cell order.
inline double official_score(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::undefined_metric, "official score: no values");
  std::vector<double> v(values.begin(), values.end());
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::validation, "official score: value outside [0, 1]");
  }
  std::sort(v.begin(), v.end());
  if (v.front() == 0.0) return 0.0;
  double inv = 0.0;
  for (double x : v) inv += 1.0 / x;
  return static_cast<double>(v.size()) / inv;
}

}  // namespace asdbench::eval
