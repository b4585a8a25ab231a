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
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"

#include "asdbench/corpus/clip_path.hpp"
#include "asdbench/corpus/dataset.hpp"
#include "asdbench/corpus/synth.hpp"
#include "asdbench/corpus/wav.hpp"

using namespace asdbench;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::usage;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("asdbench_" + name);
  fs::remove_all(dir);
  return dir;
}

// Hand-built RIFF/WAVE file with arbitrary header fields.
std::vector<std::uint8_t> wav_bytes(int channels, int rate, int bits, const std::vector<std::int32_t>& samples) {
  std::vector<std::uint8_t> out;
  auto u16 = [&](int v) { out.push_back(v & 0xff); out.push_back((v >> 8) & 0xff); };
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff); };
  auto tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  const int bytes = bits / 8;
  const auto data = static_cast<std::uint32_t>(samples.size() * bytes);
  tag("RIFF");
  u32(36 + data);
  tag("WAVE");
  tag("LIST");  // an unrelated chunk the reader must skip
  u32(4);
  tag("INFO");
  tag("fmt ");
  u32(16);
  u16(1);
  u16(channels);
  u32(rate);
  u32(rate * channels * bytes);
  u16(channels * bytes);
  u16(bits);
  tag("data");
  u32(data);
  for (auto s : samples) {
    for (int b = 0; b < bytes; ++b) out.push_back((static_cast<std::uint32_t>(s) >> (8 * b)) & 0xff);
  }
  return out;
}

}  // namespace

TEST_CASE("clip paths parse into their fields") {
  const auto m = parse_clip_path("data/dev/fan/section_02_target_test_anomaly_0042.wav");
  CHECK(m.machine_type == "fan");
  CHECK(m.section == 2);
  CHECK(m.domain == Domain::target);
  CHECK(m.split == Split::test);
  CHECK(m.condition == Condition::anomaly);
  CHECK(m.clip_id == 42);

  const auto u = parse_clip_path("ToyCar/section_05_source_test_0007.wav");
  CHECK(u.condition == Condition::unknown);
  CHECK(format_clip_path(u) == "ToyCar/section_05_source_test_0007.wav");
}

TEST_CASE("malformed clip paths name the offending token") {
  const char* bad[] = {
      "fan/section_2_source_train_normal_0001.wav",   "fan/section_06_source_train_normal_0001.wav",
      "fan/section_00_middle_train_normal_0001.wav",  "fan/section_00_source_dev_normal_0001.wav",
      "fan/section_00_source_train_broken_0001.wav",  "fan/section_00_source_train_0001.wav",
      "fan/section_00_source_train_normal_001.wav",   "fan/section_00_source_train_normal_00001.wav",
      "fan/part_00_source_train_normal_0001.wav",     "fan/section_00_source_train_normal_0001.flac",
      "section_00_source_train_normal_0001.wav",
  };
  for (const char* path : bad) {
    INFO(path);
    CHECK(code_of([&] { parse_clip_path(path); }) == ErrorCode::parse);
  }
  try {
    parse_clip_path("fan/section_00_middle_train_normal_0001.wav");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("middle") != std::string::npos);
  }
}

TEST_CASE("clip path formatting round trips") {
  std::mt19937_64 gen(1);
  const char* machines[] = {"fan", "gearbox", "ToyTrain", "machine07"};
  for (int i = 0; i < 1000; ++i) {
    ClipMeta m;
    m.machine_type = machines[gen() % 4];
    m.section = static_cast<int>(gen() % 6);
    m.domain = gen() % 2 ? Domain::source : Domain::target;
    m.split = gen() % 2 ? Split::train : Split::test;
    m.condition = static_cast<Condition>(gen() % (m.split == Split::test ? 3 : 2));
    m.clip_id = static_cast<int>(gen() % 200000);
    CHECK(parse_clip_path(format_clip_path(m)) == m);
  }
}

TEST_CASE("wav encode and decode round trip within quantization") {
  AudioClip clip{{0.0, 0.5, -0.5, 0.999, -1.0, 1e-6}, kSampleRate};
  const auto back = decode_wav(encode_wav(clip));
  REQUIRE(back.size() == clip.size());
  for (std::size_t i = 0; i < clip.size(); ++i) CHECK_THAT(back.samples[i], WithinAbs(clip.samples[i], 0.5 / 32768.0 + 1e-12));
  CHECK(back.sample_rate == kSampleRate);
}

TEST_CASE("wav decoding handles channels, depth and damage") {
  // Stereo: channel 0 is kept.
  const auto stereo = decode_wav(wav_bytes(2, 16000, 16, {16384, -1, -16384, 5}));
  REQUIRE(stereo.size() == 2);
  CHECK(stereo.samples[0] == 0.5);
  CHECK(stereo.samples[1] == -0.5);

  const auto deep = decode_wav(wav_bytes(1, 16000, 24, {-4194304, 4194304}));
  CHECK(deep.samples[0] == -0.5);
  CHECK(deep.samples[1] == 0.5);

  CHECK(code_of([] { decode_wav(wav_bytes(1, 44100, 16, {0, 0})); }) == ErrorCode::rate);
  auto truncated = wav_bytes(1, 16000, 16, {1, 2, 3, 4});
  truncated.resize(truncated.size() - 3);
  CHECK(code_of([&] { decode_wav(truncated); }) == ErrorCode::io);
  CHECK(code_of([] { decode_wav(std::vector<std::uint8_t>{'R', 'I', 'F', 'F'}); }) == ErrorCode::io);
}

TEST_CASE("mix_at_snr hits the requested ratio") {
  Rng rng(4);
  AudioClip signal{std::vector<double>(16000), kSampleRate};
  for (std::size_t i = 0; i < signal.size(); ++i) signal.samples[i] = 0.1 * std::sin(0.05 * static_cast<double>(i));
  AudioClip noise{colored_noise(16000, NoiseColor::pink, rng), kSampleRate};
  for (double target : {-10.0, -5.0, 0.0, 6.0, 20.0}) {
    const auto mix = mix_at_snr(signal, noise, target);
    std::vector<double> residual(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i) residual[i] = mix.samples[i] - signal.samples[i];
    const double snr = 20.0 * std::log10(rms(signal.samples) / rms(residual));
    CHECK_THAT(snr, WithinAbs(target, 0.01));
  }
  CHECK(code_of([&] { mix_at_snr(signal, AudioClip{std::vector<double>(10), kSampleRate}, 0.0); }) == ErrorCode::dimension);
  CHECK(code_of([&] { mix_at_snr(signal, AudioClip{std::vector<double>(16000), kSampleRate}, 0.0); }) ==
        ErrorCode::degenerate_input);
}

TEST_CASE("pink noise falls off with frequency") {
  Rng rng(9);
  const auto x = colored_noise(1 << 14, NoiseColor::pink, rng);
  CHECK_THAT(rms(x), WithinAbs(1.0, 1e-9));
  // First differences attenuate low frequencies, so pink noise keeps much
  // less energy in them than white noise does (about 2 x variance).
  std::vector<double> d(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];
  CHECK(rms(d) * rms(d) < 1.0);
  const auto w = colored_noise(1 << 14, NoiseColor::white, rng);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) d[i] = w[i + 1] - w[i];
  CHECK_THAT(rms(d) * rms(d), WithinAbs(2.0, 0.1));
}

TEST_CASE("synth clips are seeded and anomalies differ") {
  const DomainSpec spec{};
  const auto a = synth_clip(spec, Condition::normal, 5);
  const auto b = synth_clip(spec, Condition::normal, 5);
  const auto c = synth_clip(spec, Condition::anomaly, 5);
  CHECK(a.size() == static_cast<std::size_t>(kSampleRate * kClipSeconds));
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  CHECK(code_of([&] { synth_clip(spec, Condition::unknown, 1); }) == ErrorCode::validation);
  DomainSpec broken;
  broken.harmonic_count = 0;
  CHECK_THROWS_AS(synth_clip(broken, Condition::normal, 1), Error);
}

TEST_CASE("synth_corpus writes a conformant tree and refuses to overwrite") {
  const auto root = fresh_dir("corpus");
  CorpusConfig cfg;
  cfg.root = root;
  cfg.sections_per_machine = 2;
  cfg.source_train_clips = 2;
  cfg.target_train_clips = 3;
  cfg.test_clips = 1;
  cfg.seed = 3;
  const auto index = synth_corpus(cfg);
  CHECK(index.entries.size() == 2 * (2 + 3 + 4));
  CHECK(index.count("fan", 1, Domain::target, Split::train) == 3);
  CHECK(fs::exists(root / kManifestName));

  const auto scanned = scan_dataset(root);
  CHECK(scanned.entries.size() == index.entries.size());
  const auto manifest = read_manifest(root / kManifestName);
  for (std::size_t i = 0; i < index.entries.size(); ++i) {
    CHECK(manifest.entries[i].path == index.entries[i].path);
    CHECK(manifest.entries[i].meta == index.entries[i].meta);
  }

  CHECK(code_of([&] { synth_corpus(cfg); }) == ErrorCode::exists);
  const auto first = load_clip(index.absolute(index.entries.front())).samples;
  cfg.force = true;
  synth_corpus(cfg);
  CHECK(load_clip(index.absolute(index.entries.front())).samples == first);
  fs::remove_all(root);
}

TEST_CASE("scan_dataset skips stray files and reports empty trees") {
  const auto root = fresh_dir("scan");
  fs::create_directories(root / "fan");
  CHECK(code_of([&] { scan_dataset(root); }) == ErrorCode::validation);
  write_wav(root / "fan" / "section_00_source_train_normal_0000.wav", AudioClip{std::vector<double>(100), kSampleRate});
  std::ofstream(root / "fan" / "readme.txt") << "notes";
  const auto index = scan_dataset(root);
  CHECK(index.entries.size() == 1);
  CHECK(index.skipped.size() == 1);
  CHECK(code_of([&] { scan_dataset(root / "missing"); }) == ErrorCode::missing_artifact);
  fs::remove_all(root);
}
