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

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "asdbench/corpus/types.hpp"
#include "asdbench/dsp/logmel.hpp"
#include "asdbench/error.hpp"
#include "asdbench/matrix.hpp"

namespace asdbench::detectors {

/// What a scorer sees of one clip: its log-mel spectrogram plus the
/// path-borne section and (when known) domain.
struct ClipFeatures {
  std::shared_ptr<const dsp::LogMelSpectrogram> logmel;
  int section = 0;
  std::optional<Domain> domain;

  const RowMatrix& frames() const { return logmel->values; }
};

inline ClipFeatures make_clip_features(dsp::LogMelSpectrogram spec, int section, std::optional<Domain> domain) {
  return {std::make_shared<const dsp::LogMelSpectrogram>(std::move(spec)), section, domain};
}

/// Which training clips go into which model.
struct FitOptions {
  bool adapt = false;        // fit a separate target-domain IM model
  bool pool_target = true;   // without adapt: include target training clips in the single model
};

/// Time-averaged log-mel vector (1 x F), the clip-level kNN feature.
inline RowMatrix clip_summary(const dsp::LogMelSpectrogram& spec) { return spec.values.colwise().mean(); }

inline Domain require_domain(const ClipFeatures& clip) {
  if (!clip.domain) throw Error(ErrorCode::validation, "training clip without a domain label");
  return *clip.domain;
}

/// Training clips of one domain.
inline std::vector<const ClipFeatures*> clips_in(std::span<const ClipFeatures> clips, Domain d) {
  std::vector<const ClipFeatures*> out;
  for (const auto& c : clips) {
    if (require_domain(c) == d) out.push_back(&c);
  }
  return out;
}

/// Clips for a single pooled model: source, plus target when pooling.
inline std::vector<const ClipFeatures*> pooled_clips(std::span<const ClipFeatures> clips, const FitOptions& opts) {
  std::vector<const ClipFeatures*> out;
  for (const auto& c : clips) {
    if (require_domain(c) == Domain::source || opts.pool_target) out.push_back(&c);
  }
  return out;
}

/// Stacks per-clip feature rows into one matrix.
template <typename Extract>
RowMatrix stack_rows(const std::vector<const ClipFeatures*>& clips, Extract&& extract) {
  std::vector<RowMatrix> parts;
  Eigen::Index rows = 0, cols = -1;
  for (const auto* c : clips) {
    parts.push_back(extract(*c));
    rows += parts.back().rows();
    if (cols >= 0 && parts.back().cols() != cols) throw Error(ErrorCode::dimension, "inconsistent feature widths");
    cols = parts.back().cols();
  }
  RowMatrix out(rows, std::max<Eigen::Index>(cols, 0));
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  return out;
}

}  // namespace asdbench::detectors
