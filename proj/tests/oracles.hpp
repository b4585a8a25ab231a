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

// Reference computations shared by the unit and acceptance suites. Each one
// takes a different route from the library code it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "asdbench/nnet/backward.hpp"

namespace asdbench::testing {

/// Strict-inequality AUC by counting, for every anomaly, the normals strictly
/// below it. With `top` > 0 only the `top` highest normals take part.
inline double counting_auc(const std::vector<double>& neg, const std::vector<double>& pos, std::size_t top = 0) {
  std::vector<double> n = neg;
  std::sort(n.rbegin(), n.rend());
  if (top) n.resize(top);
  long long hits = 0;
  for (double a : pos) hits += std::count_if(n.begin(), n.end(), [a](double x) { return x < a; });
  return static_cast<double>(hits) / static_cast<double>(n.size() * pos.size());
}

/// |a - n| / max(floor, |a| + |n|).
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max(floor, std::abs(analytic) + std::abs(numeric));
}

/// Largest relative error between backprop and central differences over all
/// parameters.
inline double gradient_check(nnet::DenseNet& net, const RowMatrix& x, const RowMatrix& y, nnet::Loss loss,
                             double h = 1e-5) {
  const Eigen::VectorXd analytic = nnet::backward(net, x, y, loss).gradient;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < net.params().size(); ++i) {
    const double keep = net.params()[i];
    net.params()[i] = keep + h;
    const double up = nnet::compute_loss(net, x, y, loss);
    net.params()[i] = keep - h;
    const double down = nnet::compute_loss(net, x, y, loss);
    net.params()[i] = keep;
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * h)));
  }
  return worst;
}

/// A small random network with a matching batch; alternates regression with
/// MSE and classification with cross-entropy.
struct GradientCase {
  nnet::DenseNet net;
  RowMatrix x, y;
  nnet::Loss loss;
};

inline GradientCase random_gradient_case(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> width(1, 6), depth(1, 3);
  std::normal_distribution<double> z;
  const bool classify = seed % 2 == 1;
  const int layers = depth(gen);
  std::vector<int> dims{width(gen)};
  std::vector<nnet::Activation> acts;
  for (int l = 0; l < layers; ++l) {
    dims.push_back(l + 1 == layers && classify ? std::max(2, width(gen)) : width(gen));
    acts.push_back(gen() % 2 ? nnet::Activation::relu : nnet::Activation::linear);
  }
  acts.back() = classify ? nnet::Activation::softmax : nnet::Activation::linear;
  GradientCase c{nnet::DenseNet(dims, acts), {}, {}, classify ? nnet::Loss::cross_entropy : nnet::Loss::mse};
  for (Eigen::Index i = 0; i < c.net.params().size(); ++i) c.net.params()[i] = 0.5 * z(gen);
  const int batch = 1 + static_cast<int>(gen() % 5);
  c.x.resize(batch, dims.front());
  for (Eigen::Index i = 0; i < c.x.size(); ++i) c.x.data()[i] = z(gen);
  c.y = RowMatrix::Zero(batch, dims.back());
  for (int r = 0; r < batch; ++r) {
    if (classify) {
      c.y(r, static_cast<Eigen::Index>(gen() % static_cast<unsigned>(dims.back()))) = 1.0;
    } else {
      for (int k = 0; k < dims.back(); ++k) c.y(r, k) = z(gen);
    }
  }
  return c;
}

/// Closed-form maximum-likelihood Gaussian: per-dimension mean and biased
/// variance.
inline std::pair<Eigen::RowVectorXd, Eigen::RowVectorXd> gaussian_mle(const RowMatrix& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) var += (x.row(r) - mean).cwiseAbs2();
  var /= static_cast<double>(x.rows());
  return {mean, var};
}

}  // namespace asdbench::testing
