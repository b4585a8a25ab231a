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

#include "asdbench/dsp/stft.hpp"
#include "asdbench/error.hpp"

namespace asdbench::dsp {

/// HTK mel scale.
inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// F x fft_bins matrix of triangular filters whose centers are uniformly spaced
/// on the mel scale between f_min and f_max. Filters are evaluated at the FFT
/// bin center frequencies and have unit peak height.
inline RowMatrix mel_filterbank(int bands, int fft_bins, double sample_rate, double f_min, double f_max) {
  if (bands < 1 || fft_bins < 2) throw Error(ErrorCode::dimension, "mel_filterbank: need bands >= 1 and fft_bins >= 2");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw Error(ErrorCode::dimension, "mel_filterbank: require 0 <= f_min < f_max <= sr/2");
  }
  const double fft_length = 2.0 * (fft_bins - 1);
  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  std::vector<double> edges(static_cast<std::size_t>(bands) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (bands + 1));
  }

  RowMatrix fb = RowMatrix::Zero(bands, fft_bins);
  for (int m = 0; m < bands; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < fft_bins; ++k) {
      const double f = k * sample_rate / fft_length;
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb(m, k) = w;
    }
    if (fb.row(m).sum() <= 0.0) {
      throw Error(ErrorCode::dimension, "mel_filterbank: band " + std::to_string(m) +
                                            " covers no FFT bin; too many bands for this resolution");
    }
  }
  return fb;
}

}  // namespace asdbench::dsp
