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

#include <string>
#include <vector>

#include "asdbench/dsp/logmel.hpp"
#include "asdbench/error.hpp"

namespace asdbench::dsp {

/// Context images: image b holds spectrogram rows [b*shift, b*shift + P)
/// flattened row-major.
struct FeatureWindows {
  RowMatrix images;  // B x (P*F)
  int frames_per_image = 64;
  int shift = 8;
  std::vector<int> start_frames;

  int count() const { return static_cast<int>(images.rows()); }
};

/// Number of images, floor((T - P) / shift). Note that this can be one fewer
/// than the number of full windows that fit.
inline int window_count(int frames, int frames_per_image, int shift) {
  if (frames_per_image < 1 || shift < 1) throw Error(ErrorCode::window, "window length and shift must be >= 1");
  if (frames < frames_per_image + shift) {
    throw Error(ErrorCode::window, "spectrogram has " + std::to_string(frames) + " frames; need at least P + shift = " +
                                       std::to_string(frames_per_image + shift));
  }
  return (frames - frames_per_image) / shift;
}

inline FeatureWindows frame_windows(const LogMelSpectrogram& spec, int frames_per_image = 64, int shift = 8) {
  const int count = window_count(spec.frames(), frames_per_image, shift);
  const int bands = spec.bands();
  FeatureWindows out;
  out.frames_per_image = frames_per_image;
  out.shift = shift;
  out.images.resize(count, static_cast<Eigen::Index>(frames_per_image) * bands);
  out.start_frames.resize(static_cast<std::size_t>(count));
  for (int b = 0; b < count; ++b) {
    const int start = b * shift;
    out.start_frames[static_cast<std::size_t>(b)] = start;
    out.images.row(b) = Eigen::Map<const Eigen::RowVectorXd>(spec.values.data() + static_cast<Eigen::Index>(start) * bands,
                                                             out.images.cols());
  }
  return out;
}

/// Stride-1 concatenation of `context` consecutive frames, the autoencoder
/// input (640 dims for 5 x 128).
inline RowMatrix ae_frames(const LogMelSpectrogram& spec, int context = 5) {
  if (context < 1) throw Error(ErrorCode::window, "ae_frames: context must be >= 1");
  const int frames = spec.frames();
  if (frames < context) {
    throw Error(ErrorCode::window, "ae_frames: " + std::to_string(frames) + " frames < context " + std::to_string(context));
  }
  const int rows = frames - context + 1;
  const Eigen::Index width = static_cast<Eigen::Index>(context) * spec.bands();
  RowMatrix out(rows, width);
  for (int r = 0; r < rows; ++r) {
    out.row(r) = Eigen::Map<const Eigen::RowVectorXd>(spec.values.data() + static_cast<Eigen::Index>(r) * spec.bands(), width);
  }
  return out;
}

}  // namespace asdbench::dsp
