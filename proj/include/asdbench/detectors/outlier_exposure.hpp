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
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "asdbench/detectors/scorer.hpp"
#include "asdbench/dsp/windows.hpp"
#include "asdbench/nnet/model_io.hpp"
#include "asdbench/nnet/train.hpp"

namespace asdbench::detectors {

struct OeConfig {
  int frames_per_image = 64;
  int shift = 8;
  int hidden1 = 640;
  int hidden2 = 128;  // embedding width
  nnet::TrainConfig train{20, 32, 1e-5, 0, true};
  FitOptions fit{};
};

inline constexpr double kProbabilityClamp = 1e-12;

/// Mean over images of log((1 - p_b) / p_b), where p_b is the predicted
/// probability of the clip's own section; p is clamped to [1e-12, 1 - 1e-12].
inline double oe_logit_score(std::span<const double> correct_probs) {
  if (correct_probs.empty()) throw Error(ErrorCode::window, "oe_score: no images");
  double total = 0.0;
  for (double p : correct_probs) {
    const double q = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
    total += std::log((1.0 - q) / q);
  }
  return total / static_cast<double>(correct_probs.size());
}

/// Context images streamed from spectrograms with one-hot section targets.
class LabeledWindowSource {
 public:
  LabeledWindowSource(int frames_per_image, int bands, int classes)
      : width_(static_cast<Eigen::Index>(frames_per_image) * bands), bands_(bands), classes_(classes) {}

  void add(const dsp::LogMelSpectrogram& spec, int shift, int label) {
    if (spec.bands() != bands_) throw Error(ErrorCode::dimension, "oe: inconsistent band counts");
    const int count = dsp::window_count(spec.frames(), static_cast<int>(width_ / bands_), shift);
    for (int b = 0; b < count; ++b) refs_.push_back({spec.values.data() + static_cast<std::ptrdiff_t>(b) * shift * bands_, label});
  }

  std::size_t size() const { return refs_.size(); }
  Eigen::Index input_dim() const { return width_; }
  Eigen::Index target_dim() const { return classes_; }
  void fill(std::span<const std::size_t> idx, RowMatrix& x, RowMatrix& y) const {
    const auto n = static_cast<Eigen::Index>(idx.size());
    x.resize(n, width_);
    y = RowMatrix::Zero(n, classes_);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Ref& r = refs_[idx[static_cast<std::size_t>(i)]];
      std::memcpy(x.row(i).data(), r.data, sizeof(double) * static_cast<std::size_t>(width_));
      y(i, r.label) = 1.0;
    }
  }

 private:
  struct Ref {
    const double* data;
    int label;
  };
  Eigen::Index width_;
  int bands_;
  int classes_;
  std::vector<Ref> refs_;
};

/// Outlier-exposure scorer: a section classifier trained on normal clips of
/// one machine type, scoring clips by the averaged negative logit of their
/// own section.
class OeScorer final : public AnomalyScorer {
 public:
  explicit OeScorer(OeConfig config = {}) : config_(config) {}

  DetectorKind kind() const override { return DetectorKind::oe; }
  const OeConfig& config() const { return config_; }
  const nnet::DenseNet& net() const { return net_; }
  const std::vector<int>& sections() const { return sections_; }
  const std::vector<double>& loss_curve() const { return loss_curve_; }

  void fit(std::span<const ClipFeatures> clips) override {
    FitOptions pool = config_.fit;
    pool.pool_target = pool.pool_target || pool.adapt;
    const auto selected = pooled_clips(clips, pool);
    sections_.clear();
    for (const auto* c : selected) sections_.push_back(c->section);
    std::sort(sections_.begin(), sections_.end());
    sections_.erase(std::unique(sections_.begin(), sections_.end()), sections_.end());
    if (sections_.size() < 2) {
      throw Error(ErrorCode::oe_not_applicable, "oe_fit: outlier exposure needs at least 2 sections, got " +
                                                    std::to_string(sections_.size()));
    }
    const int bands = selected.front()->logmel->bands();
    LabeledWindowSource source(config_.frames_per_image, bands, static_cast<int>(sections_.size()));
    for (const auto* c : selected) source.add(*c->logmel, config_.shift, class_of(c->section));

    net_ = nnet::DenseNet({config_.frames_per_image * bands, config_.hidden1, config_.hidden2,
                           static_cast<int>(sections_.size())},
                          {nnet::Activation::relu, nnet::Activation::relu, nnet::Activation::softmax});
    net_.init_glorot(derive_seed(config_.train.seed, {0x6f65ULL}));
    loss_curve_ = nnet::train(net_, source, nnet::Loss::cross_entropy, config_.train).loss_curve;
    fitted_ = true;
  }

  dsp::FeatureWindows windows(const ClipFeatures& clip) const {
    return dsp::frame_windows(*clip.logmel, config_.frames_per_image, config_.shift);
  }

  /// B x K section posteriors.
  RowMatrix probabilities(const dsp::FeatureWindows& w) const {
    require_fitted("oe");
    return nnet::predict(net_, w.images);
  }

  /// Penultimate-layer activations (B x hidden2); the serial hybrid's features.
  RowMatrix embed(const dsp::FeatureWindows& w) const {
    require_fitted("embed");
    return nnet::predict(net_, w.images, 2);
  }

  /// Section predicted for each image.
  std::vector<int> classify(const dsp::FeatureWindows& w) const {
    const RowMatrix p = probabilities(w);
    std::vector<int> out(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      Eigen::Index best = 0;
      p.row(i).maxCoeff(&best);
      out[static_cast<std::size_t>(i)] = sections_[static_cast<std::size_t>(best)];
    }
    return out;
  }

  double oe_score(const dsp::FeatureWindows& w, int correct_section) const {
    require_fitted("oe_score");
    const int cls = class_of(correct_section);
    const RowMatrix p = probabilities(w);
    std::vector<double> correct(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) correct[static_cast<std::size_t>(i)] = p(i, cls);
    return require_finite(oe_logit_score(correct), "oe_score");
  }

  double score(const ClipFeatures& clip) const override { return oe_score(windows(clip), clip.section); }

  nlohmann::json save(ScorerArchive& ar, const std::string& prefix) const override {
    require_fitted("save");
    ar.put_net(prefix + "oe", net_);
    return {{"kind", "oe"},
            {"frames_per_image", config_.frames_per_image},
            {"shift", config_.shift},
            {"sections", sections_},
            {"adapt", config_.fit.adapt},
            {"pool_target", config_.fit.pool_target},
            {"architecture", nnet::architecture_json(net_)},
            {"train", nnet::to_json(config_.train)},
            {"loss_curve", loss_curve_}};
  }

  void load(const ScorerArchive& ar, const std::string& prefix, const nlohmann::json& meta) override {
    config_.frames_per_image = meta.at("frames_per_image");
    config_.shift = meta.at("shift");
    config_.fit.adapt = meta.at("adapt");
    config_.fit.pool_target = meta.at("pool_target");
    config_.train = nnet::train_config_from_json(meta.at("train"));
    sections_ = meta.at("sections").get<std::vector<int>>();
    loss_curve_ = meta.at("loss_curve").get<std::vector<double>>();
    net_ = ar.get_net(prefix + "oe");
    config_.hidden1 = net_.layer(0).out;
    config_.hidden2 = net_.layer(1).out;
    fitted_ = true;
  }

 private:
  int class_of(int section) const {
    const auto it = std::lower_bound(sections_.begin(), sections_.end(), section);
    if (it == sections_.end() || *it != section) {
      throw Error(ErrorCode::validation, "oe_score: section " + std::to_string(section) + " was not seen in training");
    }
    return static_cast<int>(it - sections_.begin());
  }

  OeConfig config_;
  nnet::DenseNet net_;
  std::vector<int> sections_;
  std::vector<double> loss_curve_;
};

}  // namespace asdbench::detectors
