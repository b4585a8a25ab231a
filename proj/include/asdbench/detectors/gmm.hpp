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
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "asdbench/error.hpp"
#include "asdbench/log.hpp"
#include "asdbench/matrix.hpp"
#include "asdbench/rng.hpp"

namespace asdbench::detectors {

/// Diagonal-covariance Gaussian mixture.
struct GmmModel {
  Eigen::VectorXd weights;  // K, on the simplex
  RowMatrix means;          // K x D
  RowMatrix variances;      // K x D, each >= the fit's floor

  int components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

struct GmmFitOptions {
  int components = 8;
  int max_iter = 200;
  double tol = 1e-6;         // stop when mean log-likelihood gains less than this
  double var_floor = 1e-6;
  std::uint64_t seed = 0;
};

struct GmmFitResult {
  GmmModel model;
  std::vector<double> log_likelihood;  // mean per-sample value at each E-step
  int iterations = 0;
  bool converged = false;
  bool floored = false;
};

namespace detail {

/// N x K matrix of log(w_k) + log N(x_n | mu_k, diag var_k).
inline RowMatrix weighted_log_densities(const GmmModel& model, const RowMatrix& x) {
  const Eigen::Index n = x.rows();
  const int k = model.components();
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  RowMatrix out(n, k);
  for (int c = 0; c < k; ++c) {
    const Eigen::RowVectorXd mu = model.means.row(c);
    const Eigen::RowVectorXd inv_var = model.variances.row(c).cwiseInverse();
    const double log_norm = -0.5 * (model.dim() * log_2pi + model.variances.row(c).array().log().sum());
    const double log_w = model.weights[c] > 0.0 ? std::log(model.weights[c]) : -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd maha = ((x.rowwise() - mu).array().square().rowwise() * inv_var.array()).rowwise().sum();
    out.col(c) = (log_w + log_norm) - 0.5 * maha.array();
  }
  return out;
}

inline double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double m = row.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((row.array() - m).exp().sum());
}

}  // namespace detail

/// log p(x_n) for every row.
inline Eigen::VectorXd gmm_log_density(const GmmModel& model, const RowMatrix& x) {
  if (x.cols() != model.dim()) {
    throw Error(ErrorCode::dimension, "gmm: feature width " + std::to_string(x.cols()) + " != model dimension " +
                                          std::to_string(model.dim()));
  }
  const RowMatrix lw = detail::weighted_log_densities(model, x);
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = detail::log_sum_exp(lw.row(i));
  return out;
}

/// Mean per-row negative log-likelihood; the GMM anomaly score of a clip.
inline double gmm_score(const GmmModel& model, const RowMatrix& x) {
  if (x.rows() == 0) throw Error(ErrorCode::dimension, "gmm_score: no feature rows");
  return -gmm_log_density(model, x).mean();
}

namespace detail {

/// k-means++ seeding: first center uniform, the rest sampled by squared
/// distance to the nearest chosen center.
inline std::vector<Eigen::Index> kmeanspp_centers(const RowMatrix& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  std::vector<Eigen::Index> centers{static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)))};
  Eigen::VectorXd d2 = (x.rowwise() - x.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (pick = 0; pick < n - 1; ++pick) {
        u -= d2[pick];
        if (u < 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    }
    centers.push_back(pick);
    d2 = d2.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  return centers;
}

/// M-step from responsibilities. Components with no mass keep their previous
/// mean and variance.
inline bool m_step(const RowMatrix& x, const RowMatrix& resp, GmmModel& model, double var_floor) {
  const Eigen::Index n = x.rows();
  const Eigen::RowVectorXd mass = resp.colwise().sum();
  bool floored = false;
  for (int c = 0; c < model.components(); ++c) {
    if (mass[c] > 0.0) {
      const Eigen::RowVectorXd mu = (resp.col(c).transpose() * x) / mass[c];
      Eigen::RowVectorXd var = (resp.col(c).transpose() * (x.rowwise() - mu).array().square().matrix()) / mass[c];
      if ((var.array() < var_floor).any()) floored = true;
      model.means.row(c) = mu;
      model.variances.row(c) = var.cwiseMax(var_floor);
    }
    model.weights[c] = mass[c] / static_cast<double>(n);
  }
  model.weights /= model.weights.sum();
  return floored;
}

}  // namespace detail

/// Expectation-maximization from k-means++ seeding. Iterates until the mean
/// log-likelihood gain drops below `tol` or `max_iter` E-steps have run.
inline GmmFitResult gmm_fit(const RowMatrix& x, const GmmFitOptions& opts) {
  const Eigen::Index n = x.rows();
  const int k = opts.components;
  if (k < 1) throw Error(ErrorCode::usage, "gmm_fit: components must be >= 1");
  if (n < k) {
    throw Error(ErrorCode::validation, "gmm_fit: " + std::to_string(n) + " samples < " + std::to_string(k) + " components");
  }
  if (!x.allFinite()) throw Error(ErrorCode::validation, "gmm_fit: non-finite features");

  Rng rng(derive_seed(opts.seed, {0x676d6dULL}));
  GmmFitResult result;
  GmmModel& model = result.model;
  model.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
  model.means.resize(k, x.cols());
  const Eigen::RowVectorXd global_mean = x.colwise().mean();
  const Eigen::RowVectorXd global_var =
      ((x.rowwise() - global_mean).array().square().colwise().sum() / static_cast<double>(n)).matrix().cwiseMax(opts.var_floor);
  model.variances = global_var.replicate(k, 1);

  // Hard assignment to the seeded centers gives the starting parameters.
  const auto centers = detail::kmeanspp_centers(x, k, rng);
  for (int c = 0; c < k; ++c) model.means.row(c) = x.row(centers[static_cast<std::size_t>(c)]);
  RowMatrix resp = RowMatrix::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    (model.means.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
    resp(i, best) = 1.0;
  }
  result.floored = detail::m_step(x, resp, model, opts.var_floor);

  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const RowMatrix lw = detail::weighted_log_densities(model, x);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lse = detail::log_sum_exp(lw.row(i));
      total += lse;
      resp.row(i) = (lw.row(i).array() - lse).exp();
    }
    const double ll = total / static_cast<double>(n);
    result.log_likelihood.push_back(ll);
    result.iterations = iter + 1;
    if (ll - previous < opts.tol) {
      result.converged = true;
      break;
    }
    previous = ll;
    result.floored = detail::m_step(x, resp, model, opts.var_floor) || result.floored;
  }
  if (result.floored) log::warn("gmm_fit: variance floor " + std::to_string(opts.var_floor) + " applied");
  return result;
}

}  // namespace asdbench::detectors
