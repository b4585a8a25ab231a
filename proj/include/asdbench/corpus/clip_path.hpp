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

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "asdbench/corpus/types.hpp"
#include "asdbench/error.hpp"

namespace asdbench {

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

[[noreturn]] inline void bad_token(std::string_view path, std::string_view what, std::string_view token) {
  throw Error(ErrorCode::parse, "malformed clip path '" + std::string(path) + "': bad " + std::string(what) +
                                    " token '" + std::string(token) + "'");
}

}  // namespace detail

/// Parses `<machine>/section_<NN>_<domain>_<split>[_<condition>]_<IIII>.wav`.
/// Only the last directory component is used as the machine type.
inline ClipMeta parse_clip_path(std::string_view path) {
  const std::filesystem::path p{std::string(path)};
  const std::string filename = p.filename().string();
  const std::string machine = p.parent_path().filename().string();

  std::string_view name = filename;
  if (name.size() < 4 || name.substr(name.size() - 4) != ".wav") {
    detail::bad_token(path, "extension", name);
  }
  name.remove_suffix(4);
  const auto tokens = detail::split_tokens(name, '_');
  if (tokens.size() != 5 && tokens.size() != 6) {
    detail::bad_token(path, "filename", name);
  }
  if (tokens[0] != "section") detail::bad_token(path, "section prefix", tokens[0]);
  if (machine.empty() || machine == "." || machine == "..") detail::bad_token(path, "machine", machine);

  ClipMeta meta;
  meta.machine_type = machine;

  if (tokens[1].size() != 2 || !detail::all_digits(tokens[1])) detail::bad_token(path, "section", tokens[1]);
  meta.section = (tokens[1][0] - '0') * 10 + (tokens[1][1] - '0');
  if (meta.section > kMaxSection) detail::bad_token(path, "section", tokens[1]);

  const auto domain = parse_domain(tokens[2]);
  if (!domain) detail::bad_token(path, "domain", tokens[2]);
  meta.domain = *domain;

  const auto split = parse_split(tokens[3]);
  if (!split) detail::bad_token(path, "split", tokens[3]);
  meta.split = *split;

  if (tokens.size() == 6) {
    const auto cond = parse_condition(tokens[4]);
    if (!cond || *cond == Condition::unknown) detail::bad_token(path, "condition", tokens[4]);
    meta.condition = *cond;
  } else {
    if (meta.split != Split::test) detail::bad_token(path, "condition", tokens[4]);
    meta.condition = Condition::unknown;
  }

  const std::string_view id = tokens.back();
  // At least four digits; longer ids must not carry a leading zero so the
  // formatted form is unique.
  if (id.size() < 4 || !detail::all_digits(id) || (id.size() > 4 && id[0] == '0')) {
    detail::bad_token(path, "clip id", id);
  }
  auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), meta.clip_id);
  if (ec != std::errc{}) detail::bad_token(path, "clip id", id);
  return meta;
}

inline std::string format_clip_filename(const ClipMeta& meta) {
  char section[8];
  char id[24];
  std::snprintf(section, sizeof section, "%02d", meta.section);
  std::snprintf(id, sizeof id, "%04d", meta.clip_id);
  std::string out = "section_";
  out += section;
  out += '_';
  out += to_string(meta.domain);
  out += '_';
  out += to_string(meta.split);
  if (meta.condition != Condition::unknown) {
    out += '_';
    out += to_string(meta.condition);
  }
  out += '_';
  out += id;
  out += ".wav";
  return out;
}

/// Inverse of parse_clip_path: `<machine>/<filename>`.
inline std::string format_clip_path(const ClipMeta& meta) {
  return meta.machine_type + "/" + format_clip_filename(meta);
}

}  // namespace asdbench
