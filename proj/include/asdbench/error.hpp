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

#include <stdexcept>
#include <string>
#include <string_view>

namespace asdbench {

enum class ErrorCode {
  usage,
  parse,
  rate,
  io,
  degenerate_input,
  window,
  dimension,
  state,
  training,
  oe_not_applicable,
  undefined_metric,
  validation,
  exists,
  missing_artifact,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage: return "usage";
    case ErrorCode::parse: return "parse";
    case ErrorCode::rate: return "rate";
    case ErrorCode::io: return "io";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::window: return "window";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::state: return "state";
    case ErrorCode::training: return "training";
    case ErrorCode::oe_not_applicable: return "oe_not_applicable";
    case ErrorCode::undefined_metric: return "undefined_metric";
    case ErrorCode::validation: return "validation";
    case ErrorCode::exists: return "exists";
    case ErrorCode::missing_artifact: return "missing_artifact";
  }
  return "unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Process exit status for an error code: 1 usage, 2 refused, 3 missing
/// artifact, 4 validation (and every other data-level failure).
inline int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage: return 1;
    case ErrorCode::exists: return 2;
    case ErrorCode::missing_artifact: return 3;
    default: return 4;
  }
}

}  // namespace asdbench
