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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "asdbench/corpus/clip_path.hpp"
#include "asdbench/corpus/synth.hpp"
#include "asdbench/corpus/types.hpp"
#include "asdbench/corpus/wav.hpp"
#include "asdbench/error.hpp"
#include "asdbench/log.hpp"
#include "asdbench/rng.hpp"

namespace asdbench {

namespace fs = std::filesystem;

inline constexpr const char* kManifestName = "manifest.csv";
inline constexpr const char* kManifestHeader = "path,machine,section,domain,split,condition";

struct IndexEntry {
  std::string path;  // relative to the index root, '/' separated
  ClipMeta meta;
};

using CountKey = std::tuple<std::string, int, Domain, Split>;

struct DatasetIndex {
  fs::path root;
  std::vector<IndexEntry> entries;  // sorted by meta
  std::map<CountKey, std::size_t> counts;
  std::vector<std::string> skipped;  // non-conformant files seen while scanning

  fs::path absolute(const IndexEntry& e) const { return root / e.path; }

  std::size_t count(const std::string& machine, int section, Domain d, Split s) const {
    const auto it = counts.find({machine, section, d, s});
    return it == counts.end() ? 0 : it->second;
  }

  std::vector<std::string> machines() const {
    std::set<std::string> names;
    for (const auto& e : entries) names.insert(e.meta.machine_type);
    return {names.begin(), names.end()};
  }

  std::vector<int> sections(const std::string& machine) const {
    std::set<int> s;
    for (const auto& e : entries) {
      if (e.meta.machine_type == machine) s.insert(e.meta.section);
    }
    return {s.begin(), s.end()};
  }

  template <typename Pred>
  std::vector<IndexEntry> select(Pred&& pred) const {
    std::vector<IndexEntry> out;
    for (const auto& e : entries) {
      if (pred(e.meta)) out.push_back(e);
    }
    return out;
  }

  /// Sorts entries, rebuilds counts, and rejects duplicate metadata keys.
  void finalize() {
    std::sort(entries.begin(), entries.end(), [](const IndexEntry& a, const IndexEntry& b) { return a.meta < b.meta; });
    counts.clear();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i > 0 && entries[i].meta == entries[i - 1].meta) {
        throw Error(ErrorCode::validation,
                    "duplicate clip metadata: '" + entries[i - 1].path + "' and '" + entries[i].path + "'");
      }
      const auto& m = entries[i].meta;
      ++counts[{m.machine_type, m.section, m.domain, m.split}];
    }
  }
};

inline void write_manifest(const DatasetIndex& index, const fs::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io, "cannot write '" + file.string() + "'");
  os << kManifestHeader << '\n';
  for (const auto& e : index.entries) {
    char section[8];
    std::snprintf(section, sizeof section, "%02d", e.meta.section);
    os << e.path << ',' << e.meta.machine_type << ',' << section << ',' << to_string(e.meta.domain) << ','
       << to_string(e.meta.split) << ',' << to_string(e.meta.condition) << '\n';
  }
}

/// Reads a manifest; metadata is re-derived from each path and checked
/// against the listed columns.
inline DatasetIndex read_manifest(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error(ErrorCode::missing_artifact, "manifest '" + file.string() + "' not found");
  DatasetIndex index;
  index.root = file.parent_path();
  std::string line;
  if (!std::getline(is, line) || line != kManifestHeader) {
    throw Error(ErrorCode::parse, "manifest '" + file.string() + "' has an unexpected header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = detail::split_tokens(line, ',');
    if (cols.size() != 6) throw Error(ErrorCode::parse, "manifest row '" + line + "' does not have 6 columns");
    IndexEntry e{std::string(cols[0]), parse_clip_path(cols[0])};
    char section[8];
    std::snprintf(section, sizeof section, "%02d", e.meta.section);
    if (cols[1] != e.meta.machine_type || cols[2] != section || cols[3] != to_string(e.meta.domain) ||
        cols[4] != to_string(e.meta.split) || cols[5] != to_string(e.meta.condition)) {
      throw Error(ErrorCode::validation, "manifest row '" + line + "' disagrees with its path");
    }
    index.entries.push_back(std::move(e));
  }
  index.finalize();
  return index;
}

/// Indexes every convention-conformant WAV below `root`. Other files are
/// noted in `skipped` rather than treated as errors.
inline DatasetIndex scan_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::missing_artifact, "dataset root '" + root.string() + "' does not exist");
  DatasetIndex index;
  index.root = root;
  std::vector<fs::path> files;
  for (const auto& item : fs::recursive_directory_iterator(root)) {
    if (item.is_regular_file()) files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const std::string rel = fs::relative(file, root).generic_string();
    if (rel == kManifestName) continue;
    try {
      ClipMeta meta = parse_clip_path(rel);
      index.entries.push_back({rel, std::move(meta)});
    } catch (const Error& e) {
      index.skipped.push_back(rel + ": " + e.what());
    }
  }
  if (index.entries.empty()) {
    throw Error(ErrorCode::validation, "no conformant clips found under '" + root.string() + "'");
  }
  for (const auto& note : index.skipped) log::info("skipped " + note);
  index.finalize();
  return index;
}

/// Source-to-target transform: slower machine and a noisier environment.
struct DomainShift {
  double fundamental_ratio = 0.5;
  double snr_delta_db = -5.0;

  DomainSpec apply(DomainSpec spec) const {
    spec.fundamental_hz *= fundamental_ratio;
    spec.snr_db += snr_delta_db;
    return spec;
  }
};

struct CorpusConfig {
  fs::path root;
  int machines = 1;
  int sections_per_machine = 3;
  int source_train_clips = 1000;
  int target_train_clips = 3;
  int test_clips = 50;  // per condition, per domain, per section
  DomainShift shift{};
  std::uint64_t seed = 0;
  bool force = false;
  bool identical_sections = false;
  SynthOptions synth{};
};

inline std::string machine_name(int index) {
  static const char* const names[] = {"fan", "gearbox", "pump", "slider", "ToyCar", "ToyTrain", "valve"};
  if (index >= 0 && index < 7) return names[index];
  char buf[32];
  std::snprintf(buf, sizeof buf, "machine%02d", index);
  return buf;
}

/// Source-domain spec of one section. Sections of a machine differ in
/// fundamental unless `identical` is set.
inline DomainSpec section_spec(int machine, int section, bool identical = false) {
  DomainSpec spec;
  const int s = identical ? 0 : section;
  spec.fundamental_hz = 100.0 * (1.0 + 0.2 * machine) * (1.0 + 0.25 * s);
  spec.harmonic_count = 6;
  spec.snr_db = 10.0;
  spec.noise_color = machine % 2 == 0 ? NoiseColor::pink : NoiseColor::white;
  return spec;
}

/// Writes a development-style tree (training normals in both domains, labelled
/// test clips in both domains) plus manifest.csv, and returns its index.
inline DatasetIndex synth_corpus(const CorpusConfig& cfg) {
  if (cfg.machines < 1 || cfg.sections_per_machine < 1 || cfg.source_train_clips < 1 || cfg.target_train_clips < 1 ||
      cfg.test_clips < 1) {
    throw Error(ErrorCode::usage, "synth_corpus: all counts must be > 0");
  }
  if (cfg.sections_per_machine > kMaxSection + 1) {
    throw Error(ErrorCode::usage, "synth_corpus: at most " + std::to_string(kMaxSection + 1) + " sections per machine");
  }
  if (fs::exists(cfg.root) && !fs::is_empty(cfg.root)) {
    if (!cfg.force) throw Error(ErrorCode::exists, "output directory '" + cfg.root.string() + "' is not empty");
    fs::remove(cfg.root / kManifestName);
    for (int m = 0; m < cfg.machines; ++m) fs::remove_all(cfg.root / machine_name(m));
  }
  fs::create_directories(cfg.root);

  DatasetIndex index;
  index.root = cfg.root;
  for (int m = 0; m < cfg.machines; ++m) {
    const std::string machine = machine_name(m);
    fs::create_directories(cfg.root / machine);
    for (int s = 0; s < cfg.sections_per_machine; ++s) {
      const DomainSpec source = section_spec(m, s, cfg.identical_sections);
      const DomainSpec target = cfg.shift.apply(source);
      struct Group {
        Domain domain;
        Split split;
        Condition condition;
        int count;
      };
      const Group groups[] = {
          {Domain::source, Split::train, Condition::normal, cfg.source_train_clips},
          {Domain::target, Split::train, Condition::normal, cfg.target_train_clips},
          {Domain::source, Split::test, Condition::normal, cfg.test_clips},
          {Domain::source, Split::test, Condition::anomaly, cfg.test_clips},
          {Domain::target, Split::test, Condition::normal, cfg.test_clips},
          {Domain::target, Split::test, Condition::anomaly, cfg.test_clips},
      };
      for (const Group& g : groups) {
        const DomainSpec& spec = g.domain == Domain::source ? source : target;
        for (int id = 0; id < g.count; ++id) {
          ClipMeta meta{machine, s, g.domain, g.split, g.condition, id};
          const std::uint64_t clip_seed =
              derive_seed(cfg.seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s),
                                     static_cast<std::uint64_t>(g.domain), static_cast<std::uint64_t>(g.split),
                                     static_cast<std::uint64_t>(g.condition), static_cast<std::uint64_t>(id)});
          const std::string rel = format_clip_path(meta);
          write_wav(cfg.root / rel, synth_clip(spec, g.condition, clip_seed, cfg.synth));
          index.entries.push_back({rel, std::move(meta)});
        }
      }
    }
  }
  index.finalize();
  write_manifest(index, cfg.root / kManifestName);
  return index;
}

}  // namespace asdbench
