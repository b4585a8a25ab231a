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

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"

#include "asdbench/dsp/feature_cache.hpp"
#include "asdbench/dsp/fft.hpp"
#include "asdbench/dsp/logmel.hpp"
#include "asdbench/dsp/mel.hpp"
#include "asdbench/dsp/stft.hpp"
#include "asdbench/dsp/windows.hpp"

using namespace asdbench;
using namespace asdbench::dsp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      out[k] += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n));
    }
  }
  return out;
}

AudioClip tone(double hz, std::size_t samples, double amp = 0.5) {
  AudioClip clip{std::vector<double>(samples), kSampleRate};
  for (std::size_t i = 0; i < samples; ++i) clip.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * i / kSampleRate);
  return clip;
}

}  // namespace

TEST_CASE("fft matches a direct DFT and inverts") {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> z;
  for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {z(gen), z(gen)};
    auto y = x;
    FftPlan plan(n);
    plan.transform(y);
    const auto ref = naive_dft(x);
    double energy_t = 0, energy_f = 0;
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(y[k] - ref[k]) < 1e-9 * std::sqrt(static_cast<double>(n)));
      energy_t += std::norm(x[k]);
      energy_f += std::norm(y[k]);
    }
    CHECK_THAT(energy_f, WithinRel(static_cast<double>(n) * energy_t, 1e-12));
    plan.transform(y, true);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(y[k] / static_cast<double>(n) - x[k]) < 1e-12);
  }
}

TEST_CASE("stft frame arithmetic") {
  const StftParams p;
  CHECK(frame_count(160000, p) == 311);
  CHECK(frame_count(1024, p) == 1);
  CHECK(frame_count(1535, p) == 1);
  CHECK(frame_count(1536, p) == 2);
  CHECK_THROWS_AS(frame_count(1023, p), Error);
  const auto w = make_window(p);
  CHECK(w[0] == 0.0);
  CHECK_THAT(w[512], WithinAbs(1.0, 1e-15));
  CHECK_THAT(w[256], WithinAbs(w[768], 1e-15));
}

TEST_CASE("stft of a bin-centred tone peaks at its bin") {
  for (int bin : {10, 64, 200, 500}) {
    const double hz = bin * static_cast<double>(kSampleRate) / 1024.0;
    const auto power = stft_power(tone(hz, 16000));
    REQUIRE(power.rows() == 30);
    REQUIRE(power.cols() == 513);
    for (Eigen::Index t = 0; t < power.rows(); ++t) {
      Eigen::Index best = 0;
      power.row(t).maxCoeff(&best);
      CHECK(best == bin);
    }
    // |X|^2 at the peak for amplitude A with a Hann window is (A * N / 4)^2.
    CHECK_THAT(power(3, bin), WithinRel(std::pow(0.5 * 1024 / 4.0, 2), 1e-6));
  }
}

TEST_CASE("mel scale anchors") {
  CHECK_THAT(hz_to_mel(700.0), WithinAbs(781.1728387, 1e-6));
  CHECK_THAT(hz_to_mel(0.0), WithinAbs(0.0, 1e-15));
  for (double hz : {50.0, 440.0, 1000.0, 8000.0}) CHECK_THAT(mel_to_hz(hz_to_mel(hz)), WithinRel(hz, 1e-12));
}

TEST_CASE("mel filterbank shape") {
  const auto fb = mel_filterbank(128, 513, 16000, 50, 8000);
  REQUIRE(fb.rows() == 128);
  REQUIRE(fb.cols() == 513);
  CHECK(fb.minCoeff() >= 0.0);
  CHECK(fb.maxCoeff() <= 1.0 + 1e-12);
  Eigen::Index previous = -1;
  for (Eigen::Index m = 0; m < fb.rows(); ++m) {
    CHECK(fb.row(m).sum() > 0.0);
    Eigen::Index peak = 0;
    fb.row(m).maxCoeff(&peak);
    CHECK(peak >= previous);
    previous = peak;
  }
  // Nothing below f_min.
  CHECK(fb.col(0).sum() == 0.0);
  CHECK(fb.col(3).sum() == 0.0);
  CHECK_THROWS_AS(mel_filterbank(512, 65, 16000, 50, 8000), Error);
}

TEST_CASE("log-mel of a ten second clip") {
  const auto spec = log_mel(tone(1000.0, 160000));
  CHECK(spec.frames() == 311);
  CHECK(spec.bands() == 128);
  // Band centred nearest 1 kHz carries the most energy in each frame.
  const double target_mel = hz_to_mel(1000.0);
  const double lo = hz_to_mel(50.0), hi = hz_to_mel(8000.0);
  const int expected = static_cast<int>(std::lround((target_mel - lo) / (hi - lo) * 129.0)) - 1;
  Eigen::Index best = 0;
  spec.values.row(100).maxCoeff(&best);
  CHECK(std::abs(static_cast<int>(best) - expected) <= 1);

  const auto silent = log_mel(AudioClip{std::vector<double>(4096), kSampleRate});
  CHECK_THAT(silent.values.maxCoeff(), WithinAbs(std::log(1e-10), 1e-9));
  CHECK_THROWS_AS(log_mel(AudioClip{std::vector<double>(4096), 44100}), Error);
}

TEST_CASE("context windows") {
  LogMelSpectrogram spec{RowMatrix(311, 128)};
  for (Eigen::Index t = 0; t < 311; ++t)
    for (Eigen::Index f = 0; f < 128; ++f) spec.values(t, f) = 1000.0 * t + f;
  CHECK(window_count(311, 64, 8) == 30);
  CHECK(window_count(72, 64, 8) == 1);
  CHECK_THROWS_AS(window_count(71, 64, 8), Error);
  const auto w = frame_windows(spec);
  REQUIRE(w.count() == 30);
  REQUIRE(w.images.cols() == 64 * 128);
  for (int b : {0, 7, 29}) {
    CHECK(w.start_frames[b] == 8 * b);
    CHECK(w.images(b, 0) == spec.values(8 * b, 0));
    CHECK(w.images(b, 63 * 128 + 127) == spec.values(8 * b + 63, 127));
  }
  const auto ae = ae_frames(spec);
  REQUIRE(ae.rows() == 307);
  REQUIRE(ae.cols() == 640);
  CHECK(ae(306, 639) == spec.values(310, 127));
  CHECK(ae(10, 128 * 2 + 5) == spec.values(12, 5));
}

TEST_CASE("feature cache round trip") {
  const auto path = std::filesystem::temp_directory_path() / "asdbench_cache.lmel";
  const auto spec = log_mel(tone(440.0, 16000));
  write_feature_cache(path, spec);
  const auto back = read_feature_cache(path);
  REQUIRE(back.frames() == spec.frames());
  REQUIRE(back.bands() == spec.bands());
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    CHECK(back.values.data()[i] == static_cast<double>(static_cast<float>(spec.values.data()[i])));
  }
  std::filesystem::remove(path);
}
