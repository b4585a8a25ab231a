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
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "asdbench/corpus/types.hpp"
#include "asdbench/dsp/fft.hpp"
#include "asdbench/error.hpp"
#include "asdbench/log.hpp"
#include "asdbench/rng.hpp"

namespace asdbench {

enum class NoiseColor { white, pink };

inline std::string_view to_string(NoiseColor c) { return c == NoiseColor::white ? "white" : "pink"; }

/// Generator knobs for one acoustic condition (a domain of one section).
struct DomainSpec {
  double fundamental_hz = 100.0;
  int harmonic_count = 6;
  double snr_db = 10.0;
  NoiseColor noise_color = NoiseColor::pink;

  void validate() const {
    if (!(fundamental_hz > 0.0) || !std::isfinite(fundamental_hz)) {
      throw Error(ErrorCode::validation, "DomainSpec: fundamental_hz must be > 0");
    }
    if (harmonic_count < 1) throw Error(ErrorCode::validation, "DomainSpec: harmonic_count must be >= 1");
    if (!std::isfinite(snr_db)) throw Error(ErrorCode::validation, "DomainSpec: snr_db must be finite");
  }
};

/// Clip-level randomness and fault-signature parameters shared by all specs.
struct SynthOptions {
  int sample_rate = kSampleRate;
  double seconds = kClipSeconds;
  double harmonic_rms = 0.1;
  double f0_jitter = 0.003;         // relative, uniform
  double amplitude_jitter = 0.15;   // relative, per partial
  double am_depth = 0.1;
  double am_rate_lo = 0.5, am_rate_hi = 2.0;
  // Fault signature.
  double detune = 0.06;             // 2nd partial moved up by this fraction
  double click_level = 1.0;         // click peak relative to harmonic_rms
  double click_period_lo = 0.12, click_period_hi = 0.30;  // seconds
  double click_decay = 0.0015;      // seconds

  std::size_t samples() const { return static_cast<std::size_t>(std::llround(seconds * sample_rate)); }
};

inline double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

/// Gain applied to `noise` so that signal-to-noise power ratio equals snr_db.
inline double snr_gain(double signal_rms, double noise_rms, double snr_db) {
  return (signal_rms / noise_rms) * std::pow(10.0, -snr_db / 20.0);
}

/// Clamps to [-1, 1] and warns when more than 1% of samples were clipped.
inline void clip_to_unit(std::vector<double>& x, std::string_view what) {
  std::size_t clipped = 0;
  for (double& v : x) {
    if (v > 1.0 || v < -1.0) {
      v = std::clamp(v, -1.0, 1.0);
      ++clipped;
    }
  }
  if (!x.empty() && clipped * 100 > x.size()) {
    std::ostringstream msg;
    msg << what << ": clipped " << clipped << " of " << x.size() << " samples";
    log::warn(msg.str());
  }
}

inline AudioClip mix_at_snr(const AudioClip& signal, const AudioClip& noise, double snr_db) {
  if (signal.size() != noise.size() || signal.sample_rate != noise.sample_rate) {
    throw Error(ErrorCode::dimension, "mix_at_snr: signal and noise must share length and rate");
  }
  const double s = rms(signal.samples);
  const double n = rms(noise.samples);
  if (!(s > 0.0)) throw Error(ErrorCode::degenerate_input, "mix_at_snr: signal has zero RMS");
  if (!(n > 0.0)) throw Error(ErrorCode::degenerate_input, "mix_at_snr: noise has zero RMS");
  const double g = snr_gain(s, n, snr_db);
  AudioClip out{signal.samples, signal.sample_rate};
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += g * noise.samples[i];
  clip_to_unit(out.samples, "mix_at_snr");
  return out;
}

/// Unit-variance Gaussian noise; pink noise is white noise shaped by
/// 1/sqrt(f) in the frequency domain (-3 dB per octave), then renormalized.
inline std::vector<double> colored_noise(std::size_t n, NoiseColor color, Rng& rng) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.normal();
  if (color == NoiseColor::white || n < 2) return out;

  const std::size_t fft_n = std::bit_ceil(n);
  dsp::FftPlan plan(fft_n);
  std::vector<std::complex<double>> buf(fft_n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = {out[i], 0.0};
  plan.transform(buf);
  buf[0] = 0.0;
  for (std::size_t k = 1; k <= fft_n / 2; ++k) {
    const double g = 1.0 / std::sqrt(static_cast<double>(k));
    buf[k] *= g;
    if (k != fft_n - k) buf[fft_n - k] *= g;
  }
  plan.transform(buf, /*inverse=*/true);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = buf[i].real();
    acc += out[i] * out[i];
  }
  const double scale = 1.0 / std::sqrt(acc / static_cast<double>(n));
  for (double& v : out) v *= scale;
  return out;
}

/// One clip from the distribution described by `spec`. Normal clips are an
/// amplitude-modulated harmonic stack in colored noise; anomalous clips detune
/// the second partial and add a periodic broadband click train.
inline AudioClip synth_clip(const DomainSpec& spec, Condition condition, std::uint64_t seed,
                            const SynthOptions& opts = {}) {
  spec.validate();
  if (condition == Condition::unknown) throw Error(ErrorCode::validation, "synth_clip: condition must be normal or anomaly");
  const bool anomaly = condition == Condition::anomaly;

  Rng rng(seed);
  const std::size_t n = opts.samples();
  const double sr = opts.sample_rate;
  const double two_pi = 2.0 * std::numbers::pi;

  const double f0 = spec.fundamental_hz * (1.0 + opts.f0_jitter * rng.uniform(-1.0, 1.0));
  const double am_rate = rng.uniform(opts.am_rate_lo, opts.am_rate_hi);
  const double am_phase = rng.uniform(0.0, two_pi);

  std::vector<double> harmonic(n, 0.0);
  for (int h = 1; h <= spec.harmonic_count; ++h) {
    const double amp = (1.0 / h) * (1.0 + opts.amplitude_jitter * rng.uniform(-1.0, 1.0));
    const double phase = rng.uniform(0.0, two_pi);
    double freq = h * f0;
    if (anomaly && h == 2) freq *= 1.0 + opts.detune;
    if (freq >= sr / 2.0) continue;
    const double w = two_pi * freq / sr;
    for (std::size_t i = 0; i < n; ++i) harmonic[i] += amp * std::sin(w * static_cast<double>(i) + phase);
  }
  for (std::size_t i = 0; i < n; ++i) {
    harmonic[i] *= 1.0 + opts.am_depth * std::sin(two_pi * am_rate * static_cast<double>(i) / sr + am_phase);
  }
  const double level = rms(harmonic);
  if (level > 0.0) {
    for (double& v : harmonic) v *= opts.harmonic_rms / level;
  }

  AudioClip clip = mix_at_snr(AudioClip{std::move(harmonic), opts.sample_rate},
                              AudioClip{colored_noise(n, spec.noise_color, rng), opts.sample_rate}, spec.snr_db);

  if (anomaly) {
    const double period = rng.uniform(opts.click_period_lo, opts.click_period_hi);
    const auto step = static_cast<std::size_t>(period * sr);
    const auto length = static_cast<std::size_t>(6.0 * opts.click_decay * sr);
    const double peak = opts.click_level * opts.harmonic_rms;
    for (std::size_t start = static_cast<std::size_t>(rng.uniform(0.0, period) * sr); start < n; start += step) {
      for (std::size_t j = 0; j < length && start + j < n; ++j) {
        clip.samples[start + j] += peak * std::exp(-static_cast<double>(j) / (opts.click_decay * sr)) * rng.normal();
      }
    }
    clip_to_unit(clip.samples, "synth_clip");
  }
  return clip;
}

}  // namespace asdbench
