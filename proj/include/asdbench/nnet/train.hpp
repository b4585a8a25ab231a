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

#include <concepts>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "asdbench/nnet/adam.hpp"
#include "asdbench/nnet/backward.hpp"
#include "asdbench/nnet/dense_net.hpp"
#include "asdbench/rng.hpp"

namespace asdbench::nnet {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double lr = 1e-5;
  std::uint64_t seed = 0;
  bool shuffle = true;

  void validate() const {
    if (epochs < 1) throw Error(ErrorCode::usage, "TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw Error(ErrorCode::usage, "TrainConfig: batch_size must be >= 1");
    if (!(lr >= 0.0)) throw Error(ErrorCode::usage, "TrainConfig: lr must be >= 0");
  }
};

/// Anything that can materialize (input, target) rows by sample index.
/// Lets training stream windows out of spectrograms instead of copying every
/// example up front.
template <typename S>
concept SampleSource = requires(const S& s, std::span<const std::size_t> idx, RowMatrix& x, RowMatrix& y) {
  { s.size() } -> std::convertible_to<std::size_t>;
  { s.input_dim() } -> std::convertible_to<Eigen::Index>;
  { s.target_dim() } -> std::convertible_to<Eigen::Index>;
  s.fill(idx, x, y);
};

class MatrixSource {
 public:
  MatrixSource(const RowMatrix& inputs, const RowMatrix& targets) : x_(inputs), y_(targets) {
    if (inputs.rows() != targets.rows()) throw Error(ErrorCode::dimension, "MatrixSource: row counts differ");
  }
  std::size_t size() const { return static_cast<std::size_t>(x_.rows()); }
  Eigen::Index input_dim() const { return x_.cols(); }
  Eigen::Index target_dim() const { return y_.cols(); }
  void fill(std::span<const std::size_t> idx, RowMatrix& x, RowMatrix& y) const {
    x.resize(static_cast<Eigen::Index>(idx.size()), x_.cols());
    y.resize(static_cast<Eigen::Index>(idx.size()), y_.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = x_.row(static_cast<Eigen::Index>(idx[i]));
      y.row(static_cast<Eigen::Index>(i)) = y_.row(static_cast<Eigen::Index>(idx[i]));
    }
  }

 private:
  const RowMatrix& x_;
  const RowMatrix& y_;
};

struct TrainResult {
  std::vector<double> loss_curve;  // mean training loss per epoch
};

/// Mini-batch Adam. The sample order of every epoch is drawn from
/// `config.seed`, so identical inputs give identical parameters.
template <SampleSource Source>
TrainResult train(DenseNet& net, const Source& source, Loss loss, const TrainConfig& config) {
  config.validate();
  const std::size_t n = source.size();
  if (n == 0) throw Error(ErrorCode::validation, "train: no training samples");
  if (source.input_dim() != net.input_dim() || source.target_dim() != net.output_dim()) {
    throw Error(ErrorCode::dimension, "train: source dimensions do not match the network");
  }

  AdamState adam(net.params().size(), config.lr);
  Rng rng(derive_seed(config.seed, {0x7261696eULL}));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RowMatrix x, y;
  TrainResult result;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t start = 0, batch = 0; start < n; start += config.batch_size, ++batch) {
      const std::size_t count = std::min<std::size_t>(config.batch_size, n - start);
      source.fill(std::span<const std::size_t>(order).subspan(start, count), x, y);
      LossGradient lg = backward(net, x, y, loss);
      if (!std::isfinite(lg.loss)) {
        std::ostringstream msg;
        msg << "train: non-finite loss at epoch " << epoch + 1 << ", batch " << batch << " (lr " << config.lr
            << ", max |theta| " << net.params().cwiseAbs().maxCoeff() << ")";
        throw Error(ErrorCode::training, msg.str());
      }
      adam_step(adam, net.params(), lg.gradient);
      total += lg.loss * static_cast<double>(count);
    }
    result.loss_curve.push_back(total / static_cast<double>(n));
  }
  return result;
}

inline TrainResult train(DenseNet& net, const RowMatrix& inputs, const RowMatrix& targets, Loss loss,
                         const TrainConfig& config) {
  return train(net, MatrixSource(inputs, targets), loss, config);
}

}  // namespace asdbench::nnet
