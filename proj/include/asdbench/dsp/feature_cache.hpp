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

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "asdbench/dsp/logmel.hpp"
#include "asdbench/error.hpp"

namespace asdbench::dsp {

// Feature cache layout: 16-byte header {"LMEL", u32 T, u32 F, u32 reserved},
// then T*F little-endian float32 values, row-major.
inline constexpr std::array<char, 4> kFeatureCacheMagic{'L', 'M', 'E', 'L'};

namespace detail {
inline void write_le32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}
inline std::uint32_t read_le32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
}  // namespace detail

inline void write_feature_cache(const std::filesystem::path& path, const LogMelSpectrogram& spec) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io, "cannot write feature cache '" + path.string() + "'");
  os.write(kFeatureCacheMagic.data(), 4);
  detail::write_le32(os, static_cast<std::uint32_t>(spec.frames()));
  detail::write_le32(os, static_cast<std::uint32_t>(spec.bands()));
  detail::write_le32(os, 0);
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    detail::write_le32(os, std::bit_cast<std::uint32_t>(static_cast<float>(spec.values.data()[i])));
  }
  if (!os) throw Error(ErrorCode::io, "short write to feature cache '" + path.string() + "'");
}

inline LogMelSpectrogram read_feature_cache(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::missing_artifact, "feature cache '" + path.string() + "' not found");
  unsigned char header[16];
  if (!is.read(reinterpret_cast<char*>(header), 16) || std::memcmp(header, kFeatureCacheMagic.data(), 4) != 0) {
    throw Error(ErrorCode::io, "'" + path.string() + "' is not a feature cache");
  }
  const std::uint32_t frames = detail::read_le32(header + 4);
  const std::uint32_t bands = detail::read_le32(header + 8);
  LogMelSpectrogram spec;
  spec.values.resize(frames, bands);
  std::vector<unsigned char> body(static_cast<std::size_t>(frames) * bands * 4);
  if (!is.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()))) {
    throw Error(ErrorCode::io, "feature cache '" + path.string() + "' is truncated");
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(frames) * bands; ++i) {
    spec.values.data()[i] = std::bit_cast<float>(detail::read_le32(body.data() + 4 * i));
  }
  return spec;
}

}  // namespace asdbench::dsp
