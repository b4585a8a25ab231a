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
#include <memory>

#include "asdbench/corpus/types.hpp"
#include "asdbench/dsp/mel.hpp"
#include "asdbench/dsp/stft.hpp"

namespace asdbench::dsp {

struct LogMelParams {
  StftParams stft{};
  int bands = 128;
  double f_min = 50.0;
  double f_max = 8000.0;
  double floor = 1e-10;
  int sample_rate = kSampleRate;
};

/// T x F natural-log mel energies, row-major so consecutive frames are
/// contiguous in memory.
struct LogMelSpectrogram {
  RowMatrix values;

  int frames() const { return static_cast<int>(values.rows()); }
  int bands() const { return static_cast<int>(values.cols()); }
};

/// Immutable after construction; safe to share across threads.
class LogMelExtractor {
 public:
  explicit LogMelExtractor(LogMelParams params = {})
      : params_(params),
        stft_(params.stft),
        filterbank_(mel_filterbank(params.bands, params.stft.bins(), params.sample_rate, params.f_min, params.f_max)) {}

  const LogMelParams& params() const { return params_; }
  const RowMatrix& filterbank() const { return filterbank_; }

  LogMelSpectrogram operator()(const AudioClip& clip) const {
    if (clip.sample_rate != params_.sample_rate) {
      throw Error(ErrorCode::rate, "log_mel: clip rate " + std::to_string(clip.sample_rate) + " Hz, expected " +
                                       std::to_string(params_.sample_rate));
    }
    return from_power(stft_.power(clip.samples));
  }

  LogMelSpectrogram from_power(const RowMatrix& power) const {
    LogMelSpectrogram out;
    out.values = power * filterbank_.transpose();
    out.values = (out.values.array() + params_.floor).log().matrix();
    return out;
  }

 private:
  LogMelParams params_;
  Stft stft_;
  RowMatrix filterbank_;
};

inline LogMelSpectrogram log_mel(const AudioClip& clip, const LogMelParams& params = {}) {
  return LogMelExtractor(params)(clip);
}

}  // namespace asdbench::dsp
