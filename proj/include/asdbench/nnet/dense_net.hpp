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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asdbench/error.hpp"
#include "asdbench/matrix.hpp"
#include "asdbench/rng.hpp"

namespace asdbench::nnet {

enum class Activation { relu, linear, softmax };

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::linear: return "linear";
    case Activation::softmax: return "softmax";
  }
  return "linear";
}

inline std::optional<Activation> parse_activation(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "linear") return Activation::linear;
  if (s == "softmax") return Activation::softmax;
  return std::nullopt;
}

struct LayerInfo {
  int in = 0;
  int out = 0;
  Activation activation = Activation::linear;
  Eigen::Index offset = 0;  // weights (out x in, row-major) then bias (out)

  Eigen::Index weight_count() const { return static_cast<Eigen::Index>(in) * out; }
  Eigen::Index param_count() const { return weight_count() + out; }
};

using WeightMap = Eigen::Map<RowMatrix>;
using ConstWeightMap = Eigen::Map<const RowMatrix>;
using BiasMap = Eigen::Map<Eigen::VectorXd>;
using ConstBiasMap = Eigen::Map<const Eigen::VectorXd>;

/// Fully connected network whose parameters live in one contiguous vector,
/// so optimizers and gradient checks can treat them as a flat theta.
class DenseNet {
 public:
  DenseNet() = default;

  /// `dims` has one more entry than `activations`. Softmax is only allowed on
  /// the output layer.
  DenseNet(const std::vector<int>& dims, const std::vector<Activation>& activations) {
    if (dims.size() < 2 || activations.size() + 1 != dims.size()) {
      throw Error(ErrorCode::dimension, "DenseNet: need dims.size() == activations.size() + 1 >= 2");
    }
    Eigen::Index offset = 0;
    for (std::size_t l = 0; l < activations.size(); ++l) {
      if (dims[l] < 1 || dims[l + 1] < 1) throw Error(ErrorCode::dimension, "DenseNet: layer widths must be >= 1");
      if (activations[l] == Activation::softmax && l + 1 != activations.size()) {
        throw Error(ErrorCode::dimension, "DenseNet: softmax is only allowed on the output layer");
      }
      LayerInfo info{dims[l], dims[l + 1], activations[l], offset};
      offset += info.param_count();
      layers_.push_back(info);
    }
    params_ = Eigen::VectorXd::Zero(offset);
  }

  /// Hidden layers share one activation; the last layer uses `output`.
  static DenseNet mlp(const std::vector<int>& dims, Activation hidden, Activation output) {
    std::vector<Activation> acts(dims.size() - 1, hidden);
    acts.back() = output;
    return DenseNet(dims, acts);
  }

  /// Uniform(+-sqrt(6 / (fan_in + fan_out))) weights, zero biases.
  void init_glorot(std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const double limit = std::sqrt(6.0 / (layers_[l].in + layers_[l].out));
      auto w = weight(l);
      for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-limit, limit);
      bias(l).setZero();
    }
  }

  std::size_t layer_count() const { return layers_.size(); }
  const LayerInfo& layer(std::size_t l) const { return layers_.at(l); }
  const std::vector<LayerInfo>& layers() const { return layers_; }
  int input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
  int output_dim() const { return layers_.empty() ? 0 : layers_.back().out; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  WeightMap weight(std::size_t l) {
    const auto& L = layers_.at(l);
    return {params_.data() + L.offset, L.out, L.in};
  }
  ConstWeightMap weight(std::size_t l) const {
    const auto& L = layers_.at(l);
    return {params_.data() + L.offset, L.out, L.in};
  }
  BiasMap bias(std::size_t l) {
    const auto& L = layers_.at(l);
    return {params_.data() + L.offset + L.weight_count(), L.out};
  }
  ConstBiasMap bias(std::size_t l) const {
    const auto& L = layers_.at(l);
    return {params_.data() + L.offset + L.weight_count(), L.out};
  }

  bool all_finite() const { return params_.allFinite(); }

 private:
  std::vector<LayerInfo> layers_;
  Eigen::VectorXd params_;
};

inline void softmax_rows(RowMatrix& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    const double m = row.maxCoeff();
    row = (row.array() - m).exp().matrix();
    row /= row.sum();
  }
}

inline void apply_activation(RowMatrix& z, Activation a) {
  switch (a) {
    case Activation::relu: z = z.cwiseMax(0.0); break;
    case Activation::linear: break;
    case Activation::softmax: softmax_rows(z); break;
  }
}

/// Activations of every layer; activations[0] is the input batch.
struct ForwardPass {
  std::vector<RowMatrix> activations;

  const RowMatrix& output() const { return activations.back(); }
};

inline void check_input(const DenseNet& net, const RowMatrix& batch) {
  if (net.layer_count() == 0) throw Error(ErrorCode::state, "forward: network has no layers");
  if (batch.cols() != net.input_dim()) {
    throw Error(ErrorCode::dimension, "forward: batch width " + std::to_string(batch.cols()) + " != input width " +
                                          std::to_string(net.input_dim()));
  }
}

inline RowMatrix apply_layer(const DenseNet& net, std::size_t l, const RowMatrix& input) {
  RowMatrix z(input.rows(), net.layer(l).out);
  z.noalias() = input * net.weight(l).transpose();
  z.rowwise() += net.bias(l).transpose();
  apply_activation(z, net.layer(l).activation);
  return z;
}

inline ForwardPass forward(const DenseNet& net, const RowMatrix& batch) {
  check_input(net, batch);
  ForwardPass pass;
  pass.activations.reserve(net.layer_count() + 1);
  pass.activations.push_back(batch);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    pass.activations.push_back(apply_layer(net, l, pass.activations.back()));
  }
  return pass;
}

/// Output of layer `upto - 1` (upto = layer_count() gives the network output),
/// evaluated in row chunks to bound memory.
inline RowMatrix predict(const DenseNet& net, const RowMatrix& batch, std::size_t upto = SIZE_MAX,
                         Eigen::Index chunk = 1024) {
  check_input(net, batch);
  upto = std::min(upto, net.layer_count());
  const int width = upto == 0 ? net.input_dim() : net.layer(upto - 1).out;
  RowMatrix out(batch.rows(), width);
  for (Eigen::Index start = 0; start < batch.rows(); start += chunk) {
    const Eigen::Index n = std::min(chunk, batch.rows() - start);
    RowMatrix a = batch.middleRows(start, n);
    for (std::size_t l = 0; l < upto; ++l) a = apply_layer(net, l, a);
    out.middleRows(start, n) = a;
  }
  return out;
}

}  // namespace asdbench::nnet
