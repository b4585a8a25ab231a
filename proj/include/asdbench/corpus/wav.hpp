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
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "asdbench/corpus/types.hpp"
#include "asdbench/error.hpp"

namespace asdbench {

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}
inline void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

inline std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}
inline std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

inline std::int16_t quantize_pcm16(double x) {
  const double scaled = std::nearbyint(std::clamp(x, -1.0, 1.0) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

}  // namespace detail

/// RIFF/WAVE, 16-bit little-endian PCM, mono.
inline std::vector<std::uint8_t> encode_wav(const AudioClip& clip) {
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  detail::put_tag(out, "RIFF");
  detail::put_u32(out, 36 + data_bytes);
  detail::put_tag(out, "WAVE");
  detail::put_tag(out, "fmt ");
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);  // PCM
  detail::put_u16(out, 1);  // mono
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  detail::put_u16(out, 2);
  detail::put_u16(out, 16);
  detail::put_tag(out, "data");
  detail::put_u32(out, data_bytes);
  for (double x : clip.samples) {
    detail::put_u16(out, static_cast<std::uint16_t>(detail::quantize_pcm16(x)));
  }
  return out;
}

inline void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  const auto bytes = encode_wav(clip);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorCode::io, "short write to '" + path.string() + "'");
}

/// Decodes integer PCM (16, 24 or 32 bit). Multichannel input keeps channel 0.
/// The sample rate must equal `expected_rate`; nothing is resampled.
inline AudioClip decode_wav(std::span<const std::uint8_t> bytes, const std::string& name = "<memory>",
                            int expected_rate = kSampleRate) {
  auto fail = [&](ErrorCode code, const std::string& why) -> Error {
    return Error(code, "'" + name + "': " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail(ErrorCode::io, "not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = detail::get_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw fail(ErrorCode::io, "truncated fmt chunk");
      format = detail::get_u16(bytes, body);
      channels = detail::get_u16(bytes, body + 2);
      rate = detail::get_u32(bytes, body + 4);
      block_align = detail::get_u16(bytes, body + 12);
      bits = detail::get_u16(bytes, body + 14);
      // WAVE_FORMAT_EXTENSIBLE: the sub-format GUID starts with the format tag.
      if (format == 0xFFFE && size >= 26) format = detail::get_u16(bytes, body + 24);
      have_fmt = true;
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw fail(ErrorCode::io, "data chunk before fmt chunk");
      if (format != 1) throw fail(ErrorCode::io, "only integer PCM is supported (format tag " + std::to_string(format) + ")");
      if (bits != 16 && bits != 24 && bits != 32) throw fail(ErrorCode::io, "unsupported bit depth " + std::to_string(bits));
      if (channels == 0 || block_align != channels * (bits / 8)) throw fail(ErrorCode::io, "inconsistent block alignment");
      if (static_cast<int>(rate) != expected_rate) {
        throw fail(ErrorCode::rate, "sample rate " + std::to_string(rate) + " Hz, expected " + std::to_string(expected_rate));
      }
      if (body + size > bytes.size() || size % block_align != 0) throw fail(ErrorCode::io, "truncated data chunk");

      const std::size_t frames = size / block_align;
      const int bytes_per_sample = bits / 8;
      const double scale = std::ldexp(1.0, -(bits - 1));
      AudioClip clip;
      clip.sample_rate = static_cast<int>(rate);
      clip.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        const std::size_t at = body + i * block_align;
        std::uint32_t raw = 0;
        for (int b = 0; b < bytes_per_sample; ++b) raw |= static_cast<std::uint32_t>(bytes[at + b]) << (8 * b);
        // Sign-extend from the top bit of the sample width.
        const int shift = 32 - bits;
        const auto value = static_cast<std::int32_t>(raw << shift) >> shift;
        clip.samples[i] = value * scale;
      }
      return clip;
    }
    pos = body + size + (size & 1u);
  }
  throw fail(ErrorCode::io, have_fmt ? "missing or truncated data chunk" : "missing fmt chunk");
}

inline AudioClip load_clip(const std::filesystem::path& path, int expected_rate = kSampleRate) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.string(), expected_rate);
}

}  // namespace asdbench
