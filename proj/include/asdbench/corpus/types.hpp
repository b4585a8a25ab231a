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

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asdbench {

inline constexpr int kSampleRate = 16000;
inline constexpr int kClipSeconds = 10;
inline constexpr int kMaxSection = 5;

enum class Domain { source, target };
enum class Split { train, test };
enum class Condition { normal, anomaly, unknown };

inline std::string_view to_string(Domain d) { return d == Domain::source ? "source" : "target"; }
inline std::string_view to_string(Split s) { return s == Split::train ? "train" : "test"; }
inline std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::normal: return "normal";
    case Condition::anomaly: return "anomaly";
    case Condition::unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<Domain> parse_domain(std::string_view s) {
  if (s == "source") return Domain::source;
  if (s == "target") return Domain::target;
  return std::nullopt;
}
inline std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  return std::nullopt;
}
inline std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "normal") return Condition::normal;
  if (s == "anomaly") return Condition::anomaly;
  if (s == "unknown") return Condition::unknown;
  return std::nullopt;
}

/// Side information carried by a clip's path: machine type, section, domain,
/// split, condition label and clip number.
struct ClipMeta {
  std::string machine_type;
  int section = 0;
  Domain domain = Domain::source;
  Split split = Split::train;
  Condition condition = Condition::normal;
  int clip_id = 0;

  friend auto operator<=>(const ClipMeta&, const ClipMeta&) = default;
};

/// Mono waveform with samples nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

}  // namespace asdbench
