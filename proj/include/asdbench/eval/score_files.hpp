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
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "asdbench/corpus/clip_path.hpp"
#include "asdbench/eval/report.hpp"

namespace asdbench::eval {

namespace fs = std::filesystem;

/// `anomaly_score_<machine>_section_<NN>_<domain>.csv`
inline std::string score_file_name(const std::string& machine, int section, Domain domain) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", section);
  return "anomaly_score_" + machine + "_section_" + buf + "_" + std::string(to_string(domain)) + ".csv";
}

inline std::string format_score(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One `filename,score` CSV per (machine, section, domain), rows in filename
/// order. Returns the files written.
inline std::vector<fs::path> write_score_files(const fs::path& dir, const std::vector<ScoreRecord>& records) {
  fs::create_directories(dir);
  std::map<std::tuple<std::string, int, Domain>, std::vector<std::pair<std::string, double>>> files;
  for (const auto& r : records) {
    files[{r.meta.machine_type, r.meta.section, r.meta.domain}].emplace_back(format_clip_filename(r.meta), r.score);
  }
  std::vector<fs::path> written;
  for (auto& [key, rows] : files) {
    std::sort(rows.begin(), rows.end());
    const fs::path path = dir / score_file_name(std::get<0>(key), std::get<1>(key), std::get<2>(key));
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
    os << "filename,score\n";
    for (const auto& [name, score] : rows) os << name << ',' << format_score(score) << '\n';
    written.push_back(path);
  }
  return written;
}

/// Parses one score file; the machine type comes from the file name.
inline std::vector<ScoreRecord> read_score_file(const fs::path& path) {
  const std::string name = path.filename().string();
  const std::string prefix = "anomaly_score_";
  const auto marker = name.rfind("_section_");
  if (name.rfind(prefix, 0) != 0 || marker == std::string::npos || marker <= prefix.size()) {
    throw Error(ErrorCode::parse, "'" + name + "' is not a score file name");
  }
  const std::string machine = name.substr(prefix.size(), marker - prefix.size());
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::missing_artifact, "score file '" + path.string() + "' not found");
  std::string line;
  if (!std::getline(is, line) || line != "filename,score") {
    throw Error(ErrorCode::parse, "'" + name + "': expected header 'filename,score'");
  }
  std::vector<ScoreRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::parse, "'" + name + "': malformed row '" + line + "'");
    ScoreRecord r;
    r.meta = parse_clip_path(machine + "/" + line.substr(0, comma));
    const std::string value = line.substr(comma + 1);
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), r.score);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw Error(ErrorCode::parse, "'" + name + "': bad score '" + value + "'");
    }
    if (score_file_name(machine, r.meta.section, r.meta.domain) != name) {
      throw Error(ErrorCode::validation, "'" + name + "' lists clip '" + line.substr(0, comma) + "' from another cell");
    }
    out.push_back(r);
  }
  return out;
}

inline std::vector<ScoreRecord> read_score_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::missing_artifact, "score directory '" + dir.string() + "' not found");
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    const std::string n = item.path().filename().string();
    if (item.is_regular_file() && n.rfind("anomaly_score_", 0) == 0 && item.path().extension() == ".csv") {
      files.push_back(item.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::missing_artifact, "no score files in '" + dir.string() + "'");
  std::vector<ScoreRecord> out;
  for (const auto& f : files) {
    auto part = read_score_file(f);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace asdbench::eval
