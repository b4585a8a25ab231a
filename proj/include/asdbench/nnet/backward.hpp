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
#include <string>

#include "asdbench/nnet/dense_net.hpp"

namespace asdbench::nnet {

enum class Loss { mse, cross_entropy };

struct LossGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;  // same layout as DenseNet::params()
};

namespace detail {

inline void check_loss_shapes(const DenseNet& net, const RowMatrix& batch, const RowMatrix& targets, Loss loss) {
  check_input(net, batch);
  if (targets.rows() != batch.rows() || targets.cols() != net.output_dim()) {
    throw Error(ErrorCode::dimension, "loss: targets are " + std::to_string(targets.rows()) + "x" +
                                          std::to_string(targets.cols()) + ", expected " + std::to_string(batch.rows()) +
                                          "x" + std::to_string(net.output_dim()));
  }
  if (batch.rows() == 0) throw Error(ErrorCode::dimension, "loss: empty batch");
  const bool softmax_out = net.layers().back().activation == Activation::softmax;
  if (loss == Loss::cross_entropy && !softmax_out) {
    throw Error(ErrorCode::dimension, "cross-entropy requires a softmax output layer");
  }
  if (loss == Loss::mse && softmax_out) throw Error(ErrorCode::dimension, "mse is not supported on a softmax output layer");
}

inline double loss_value(const RowMatrix& output, const RowMatrix& targets, Loss loss) {
  const double n = static_cast<double>(output.rows());
  if (loss == Loss::mse) {
    return (output - targets).squaredNorm() / (n * static_cast<double>(output.cols()));
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < output.size(); ++i) {
    const double t = targets.data()[i];
    if (t != 0.0) acc -= t * std::log(std::max(output.data()[i], 1e-300));
  }
  return acc / n;
}

}  // namespace detail

/// Mean loss over the batch. MSE averages over output dimensions as well;
/// cross-entropy expects probability rows in `targets`.
inline double compute_loss(const DenseNet& net, const RowMatrix& batch, const RowMatrix& targets, Loss loss) {
  detail::check_loss_shapes(net, batch, targets, loss);
  return detail::loss_value(predict(net, batch), targets, loss);
}

/// Backpropagation of the mean batch loss with respect to every parameter.
inline LossGradient backward(const DenseNet& net, const RowMatrix& batch, const RowMatrix& targets, Loss loss) {
  detail::check_loss_shapes(net, batch, targets, loss);
  const ForwardPass pass = forward(net, batch);
  const RowMatrix& out = pass.output();
  const double n = static_cast<double>(batch.rows());

  LossGradient result;
  result.loss = detail::loss_value(out, targets, loss);
  result.gradient = Eigen::VectorXd::Zero(net.params().size());

  // delta = dL/d(pre-activation) of the current layer.
  RowMatrix delta;
  if (loss == Loss::cross_entropy) {
    delta = (out - targets) / n;
  } else {
    delta = (out - targets) * (2.0 / (n * static_cast<double>(out.cols())));
    if (net.layers().back().activation == Activation::relu) {
      delta = delta.cwiseProduct((out.array() > 0.0).cast<double>().matrix());
    }
  }

  for (std::size_t l = net.layer_count(); l-- > 0;) {
    const LayerInfo& info = net.layer(l);
    const RowMatrix& input = pass.activations[l];
    WeightMap gw(result.gradient.data() + info.offset, info.out, info.in);
    gw.noalias() = delta.transpose() * input;
    BiasMap(result.gradient.data() + info.offset + info.weight_count(), info.out) = delta.colwise().sum().transpose();
    if (l == 0) break;
    RowMatrix upstream = delta * net.weight(l);
    if (net.layer(l - 1).activation == Activation::relu) {
      upstream = upstream.cwiseProduct((input.array() > 0.0).cast<double>().matrix());
    }
    delta = std::move(upstream);
  }
  return result;
}

}  // namespace asdbench::nnet
