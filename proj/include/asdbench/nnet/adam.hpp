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
#include <string>

#include "asdbench/error.hpp"
#include "asdbench/matrix.hpp"

namespace asdbench::nnet {

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(Eigen::Index dim, double learning_rate)
      : m(Eigen::VectorXd::Zero(dim)), v(Eigen::VectorXd::Zero(dim)), lr(learning_rate) {}
};

/// One bias-corrected Adam update of `theta` in place.
inline void adam_step(AdamState& state, Eigen::VectorXd& theta, const Eigen::VectorXd& gradient) {
  if (theta.size() != gradient.size() || state.m.size() != theta.size() || state.v.size() != theta.size()) {
    throw Error(ErrorCode::dimension, "adam_step: parameter, gradient and moment sizes differ");
  }
  if (!gradient.allFinite()) {
    throw Error(ErrorCode::training, "adam_step: non-finite gradient at step " + std::to_string(state.step + 1));
  }
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * gradient;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  theta.array() -= state.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

}  // namespace asdbench::nnet
