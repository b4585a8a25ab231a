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

#include <functional>
#include <iostream>
#include <string>
#include <string_view>
#include <utility>

namespace asdbench::log {

using Sink = std::function<void(std::string_view level, std::string_view message)>;

inline Sink& sink() {
  static Sink current = [](std::string_view level, std::string_view message) {
    std::cerr << level << ": " << message << '\n';
  };
  return current;
}

inline void warn(std::string_view message) { sink()("warning", message); }
inline void info(std::string_view message) { sink()("info", message); }

/// Redirects log output for the lifetime of the guard.
class ScopedSink {
 public:
  explicit ScopedSink(Sink replacement) : saved_(std::exchange(sink(), std::move(replacement))) {}
  ~ScopedSink() { sink() = std::move(saved_); }
  ScopedSink(const ScopedSink&) = delete;
  ScopedSink& operator=(const ScopedSink&) = delete;

 private:
  Sink saved_;
};

}  // namespace asdbench::log
