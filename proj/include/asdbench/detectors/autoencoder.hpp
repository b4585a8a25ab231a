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

#include <cstring>
#include <string>
#include <vector>

#include "asdbench/detectors/scorer.hpp"
#include "asdbench/dsp/windows.hpp"
#include "asdbench/nnet/model_io.hpp"
#include "asdbench/nnet/train.hpp"

namespace asdbench::detectors {

struct AeConfig {
  int context = 5;
  int hidden = 128;
  int hidden_layers = 4;  // on each side of the bottleneck
  int bottleneck = 8;
  nnet::TrainConfig train{100, 512, 1e-3, 0, true};
  int frame_stride = 1;   // keep every n-th context vector for training
  FitOptions fit{};
};

/// Context vectors (stride-1 stacks of `context` frames) read in place from
/// row-major spectrograms; targets equal inputs.
class ContextFrameSource {
 public:
  ContextFrameSource(const std::vector<const ClipFeatures*>& clips, int context, int stride) : context_(context) {
    for (const auto* c : clips) {
      const int frames = c->logmel->frames();
      if (frames < context) throw Error(ErrorCode::window, "autoencoder: clip shorter than the frame context");
      if (bands_ == 0) bands_ = c->logmel->bands();
      if (c->logmel->bands() != bands_) throw Error(ErrorCode::dimension, "autoencoder: inconsistent band counts");
      for (int r = 0; r + context <= frames; r += stride) refs_.push_back({c->logmel->values.data(), r});
    }
  }
  std::size_t size() const { return refs_.size(); }
  Eigen::Index input_dim() const { return static_cast<Eigen::Index>(context_) * bands_; }
  Eigen::Index target_dim() const { return input_dim(); }
  void fill(std::span<const std::size_t> idx, RowMatrix& x, RowMatrix& y) const {
    const Eigen::Index width = input_dim();
    x.resize(static_cast<Eigen::Index>(idx.size()), width);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const Ref& r = refs_[idx[i]];
      std::memcpy(x.row(static_cast<Eigen::Index>(i)).data(), r.data + static_cast<std::ptrdiff_t>(r.row) * bands_,
                  sizeof(double) * static_cast<std::size_t>(width));
    }
    y = x;
  }

 private:
  struct Ref {
    const double* data;
    int row;
  };
  int context_;
  int bands_ = 0;
  std::vector<Ref> refs_;
};

/// Reconstruction-error scorer: a dense autoencoder over 5-frame context
/// vectors, scored by mean squared reconstruction error.
class AeScorer final : public AnomalyScorer {
 public:
  explicit AeScorer(AeConfig config = {}) : config_(config) {}

  DetectorKind kind() const override { return DetectorKind::ae; }
  const nnet::DenseNet& net() const { return net_; }
  const std::vector<double>& loss_curve() const { return loss_curve_; }

  static nnet::DenseNet make_net(const AeConfig& c, int bands) {
    std::vector<int> dims{c.context * bands};
    for (int i = 0; i < c.hidden_layers; ++i) dims.push_back(c.hidden);
    dims.push_back(c.bottleneck);
    for (int i = 0; i < c.hidden_layers; ++i) dims.push_back(c.hidden);
    dims.push_back(c.context * bands);
    return nnet::DenseNet::mlp(dims, nnet::Activation::relu, nnet::Activation::linear);
  }

  /// Uses an already-built network (e.g. identity weights in tests).
  void set_net(nnet::DenseNet net) {
    net_ = std::move(net);
    fitted_ = true;
  }

  void fit(std::span<const ClipFeatures> clips) override {
    FitOptions pool = config_.fit;
    pool.pool_target = pool.pool_target || pool.adapt;
    const auto selected = pooled_clips(clips, pool);
    if (selected.empty()) throw Error(ErrorCode::validation, "ae_fit: no training clips");
    ContextFrameSource source(selected, config_.context, std::max(1, config_.frame_stride));
    net_ = make_net(config_, selected.front()->logmel->bands());
    net_.init_glorot(derive_seed(config_.train.seed, {0x6165ULL}));
    loss_curve_ = nnet::train(net_, source, nnet::Loss::mse, config_.train).loss_curve;
    fitted_ = true;
  }

  /// Mean over rows and dimensions of the squared reconstruction error.
  double ae_score(const RowMatrix& vectors) const {
    require_fitted("ae_score");
    const RowMatrix recon = nnet::predict(net_, vectors);
    return require_finite((recon - vectors).squaredNorm() / static_cast<double>(vectors.size()), "ae_score");
  }

  double score(const ClipFeatures& clip) const override { return ae_score(dsp::ae_frames(*clip.logmel, config_.context)); }

  nlohmann::json save(ScorerArchive& ar, const std::string& prefix) const override {
    require_fitted("save");
    ar.put_net(prefix + "ae", net_);
    return {{"kind", "ae"},
            {"context", config_.context},
            {"frame_stride", config_.frame_stride},
            {"adapt", config_.fit.adapt},
            {"pool_target", config_.fit.pool_target},
            {"architecture", nnet::architecture_json(net_)},
            {"train", nnet::to_json(config_.train)},
            {"loss_curve", loss_curve_}};
  }

  void load(const ScorerArchive& ar, const std::string& prefix, const nlohmann::json& meta) override {
    config_.context = meta.at("context");
    config_.frame_stride = meta.at("frame_stride");
    config_.fit.adapt = meta.at("adapt");
    config_.fit.pool_target = meta.at("pool_target");
    config_.train = nnet::train_config_from_json(meta.at("train"));
    loss_curve_ = meta.at("loss_curve").get<std::vector<double>>();
    net_ = ar.get_net(prefix + "ae");
    fitted_ = true;
  }

 private:
  AeConfig config_;
  nnet::DenseNet net_;
  std::vector<double> loss_curve_;
};

}  // namespace asdbench::detectors
