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

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "asdbench/corpus/types.hpp"
#include "asdbench/dsp/fft.hpp"
#include "asdbench/error.hpp"
#include "asdbench/matrix.hpp"

namespace asdbench::dsp {

enum class Window { hann };

/// 1024-sample (64 ms at 16 kHz) frames with a 50% hop.
struct StftParams {
  int frame_length = 1024;
  int hop = 512;
  Window window = Window::hann;

  int bins() const { return frame_length / 2 + 1; }

  void validate() const {
    if (frame_length <= 0 || !std::has_single_bit(static_cast<unsigned>(frame_length))) {
      throw Error(ErrorCode::dimension, "frame_length must be a power of two");
    }
    if (hop <= 0 || hop > frame_length) throw Error(ErrorCode::dimension, "hop must be in [1, frame_length]");
  }
};

/// Periodic Hann window.
inline std::vector<double> make_window(const StftParams& params) {
  std::vector<double> w(static_cast<std::size_t>(params.frame_length));
  for (std::size_t n = 0; n < w.size(); ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(w.size()));
  }
  return w;
}

/// Number of frames without padding: 1 + floor((len - frame) / hop).
inline int frame_count(std::size_t samples, const StftParams& params) {
  if (samples < static_cast<std::size_t>(params.frame_length)) {
    throw Error(ErrorCode::window, "clip of " + std::to_string(samples) + " samples is shorter than one " +
                                       std::to_string(params.frame_length) + "-sample frame");
  }
  return 1 + static_cast<int>((samples - params.frame_length) / params.hop);
}

/// Reusable STFT engine; holds the FFT plan and window.
class Stft {
 public:
  explicit Stft(StftParams params = {})
      : params_((params.validate(), params)),
        plan_(static_cast<std::size_t>(params.frame_length)),
        window_(make_window(params)) {}

  const StftParams& params() const { return params_; }

  /// T x (frame_length/2 + 1) matrix of |windowed DFT|^2.
  RowMatrix power(std::span<const double> samples) const {
    const int frames = frame_count(samples.size(), params_);
    const int bins = params_.bins();
    RowMatrix out(frames, bins);
    std::vector<std::complex<double>> buffer(window_.size());
    for (int t = 0; t < frames; ++t) {
      const std::size_t offset = static_cast<std::size_t>(t) * params_.hop;
      for (std::size_t n = 0; n < buffer.size(); ++n) buffer[n] = {samples[offset + n] * window_[n], 0.0};
      plan_.transform(buffer);
      for (int k = 0; k < bins; ++k) out(t, k) = std::norm(buffer[static_cast<std::size_t>(k)]);
    }
    return out;
  }

 private:
  StftParams params_;
  FftPlan plan_;
  std::vector<double> window_;
};

inline RowMatrix stft_power(const AudioClip& clip, const StftParams& params = {}) {
  return Stft(params).power(clip.samples);
}

}  // namespace asdbench::dsp
