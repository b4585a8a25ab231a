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
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "asdbench/cli/config.hpp"
#include "asdbench/corpus/wav.hpp"
#include "asdbench/detectors/factory.hpp"
#include "asdbench/dsp/logmel.hpp"
#include "asdbench/eval/report.hpp"
#include "asdbench/eval/score_files.hpp"

namespace asdbench::cli {

/// Manifest when present, directory scan otherwise.
inline DatasetIndex load_index(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::missing_artifact, "dataset root '" + root.string() + "' does not exist");
  if (fs::exists(root / kManifestName)) {
    DatasetIndex index = read_manifest(root / kManifestName);
    index.root = root;
    return index;
  }
  return scan_dataset(root);
}

inline std::vector<std::string> selected_machines(const DatasetIndex& index, const RunConfig& cfg) {
  const auto all = index.machines();
  if (cfg.machines.empty()) return all;
  for (const auto& m : cfg.machines) {
    if (std::find(all.begin(), all.end(), m) == all.end()) {
      throw Error(ErrorCode::validation, "machine type '" + m + "' not found in the dataset");
    }
  }
  auto out = cfg.machines;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline fs::path model_path(const fs::path& models, const std::string& machine, detectors::DetectorKind kind) {
  return models / (machine + "." + std::string(to_string(kind)) + ".bin");
}

inline std::vector<detectors::ClipFeatures> extract_features(const DatasetIndex& index,
                                                             const std::vector<IndexEntry>& entries,
                                                             const dsp::LogMelExtractor& extractor) {
  std::vector<detectors::ClipFeatures> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    const AudioClip clip = load_clip(index.absolute(e), extractor.params().sample_rate);
    out.push_back(detectors::make_clip_features(extractor(clip), e.meta.section, e.meta.domain));
  }
  return out;
}

namespace detail {

inline void report_losses(const detectors::AnomalyScorer& scorer, const std::string& label) {
  std::vector<double> curve;
  if (const auto* ae = dynamic_cast<const detectors::AeScorer*>(&scorer)) curve = ae->loss_curve();
  if (const auto* oe = dynamic_cast<const detectors::OeScorer*>(&scorer)) curve = oe->loss_curve();
  if (const auto* serial = dynamic_cast<const detectors::SerialScorer*>(&scorer)) curve = serial->extractor().loss_curve();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    log::info(label + " epoch " + std::to_string(i + 1) + "/" + std::to_string(curve.size()) +
              " loss " + eval::format_score(curve[i]));
  }
  if (const auto* ens = dynamic_cast<const detectors::EnsembleScorer*>(&scorer)) {
    for (const auto& member : ens->spec().members) {
      report_losses(*member, label + "/" + std::string(to_string(member->kind())));
    }
  }
}

}  // namespace detail

inline int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  if (cfg.data.empty()) throw Error(ErrorCode::usage, "synth: --out is required");
  const DatasetIndex index = synth_corpus(cfg.corpus);
  out << "wrote " << index.entries.size() << " clips to " << cfg.data.string() << '\n';
  for (const auto& machine : index.machines()) {
    for (int section : index.sections(machine)) {
      for (Domain d : {Domain::source, Domain::target}) {
        out << machine << " section " << section << ' ' << to_string(d)
            << ": train " << index.count(machine, section, d, Split::train)
            << ", test " << index.count(machine, section, d, Split::test) << '\n';
      }
    }
  }
  return 0;
}

inline int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const DatasetIndex index = load_index(cfg.data);
  const dsp::LogMelExtractor extractor;
  fs::create_directories(cfg.models);
  for (const auto& machine : selected_machines(index, cfg)) {
    const auto entries = index.select([&](const ClipMeta& m) { return m.machine_type == machine && m.split == Split::train; });
    if (entries.empty()) throw Error(ErrorCode::validation, "no training clips for machine type '" + machine + "'");
    const auto clips = extract_features(index, entries, extractor);
    auto scorer = detectors::make_scorer(cfg.detector, cfg.detectors);
    scorer->set_machine_type(machine);
    scorer->fit(clips);
    detail::report_losses(*scorer, machine + "/" + std::string(to_string(cfg.detector)));
    const fs::path path = model_path(cfg.models, machine, cfg.detector);
    detectors::save_scorer(path, *scorer);
    out << "trained " << to_string(cfg.detector) << " on " << clips.size() << " " << machine << " clips -> "
        << path.string() << '\n';
  }
  return 0;
}

inline int cmd_score(const RunConfig& cfg, std::ostream& out) {
  const DatasetIndex index = load_index(cfg.data);
  const dsp::LogMelExtractor extractor;
  std::vector<eval::ScoreRecord> records;
  for (const auto& machine : selected_machines(index, cfg)) {
    const fs::path path = model_path(cfg.models, machine, cfg.detector);
    if (!fs::exists(path)) throw Error(ErrorCode::missing_artifact, "model '" + path.string() + "' not found; run train first");
    const auto scorer = detectors::load_scorer(path);
    const auto entries = index.select([&](const ClipMeta& m) { return m.machine_type == machine && m.split == Split::test; });
    for (const auto& e : entries) {
      const AudioClip clip = load_clip(index.absolute(e), extractor.params().sample_rate);
      const auto features = detectors::make_clip_features(extractor(clip), e.meta.section, e.meta.domain);
      records.push_back({e.meta, scorer->score(features)});
    }
  }
  if (records.empty()) throw Error(ErrorCode::validation, "no test clips to score");
  const auto files = eval::write_score_files(cfg.scores, records);
  out << "scored " << records.size() << " clips into " << files.size() << " files under " << cfg.scores.string() << '\n';
  return 0;
}

/// Restricts the index to the machine types being evaluated.
inline DatasetIndex eval_index(const RunConfig& cfg) {
  DatasetIndex index = load_index(cfg.data);
  const auto machines = selected_machines(index, cfg);
  std::erase_if(index.entries, [&](const IndexEntry& e) {
    return std::find(machines.begin(), machines.end(), e.meta.machine_type) == machines.end();
  });
  return index;
}

inline eval::MetricsReport evaluate_scores(const RunConfig& cfg, const fs::path& scores, const fs::path& out_dir) {
  const DatasetIndex index = eval_index(cfg);
  auto records = eval::read_score_dir(scores);
  std::erase_if(records, [&](const eval::ScoreRecord& r) {
    return !cfg.machines.empty() &&
           std::find(cfg.machines.begin(), cfg.machines.end(), r.meta.machine_type) == cfg.machines.end();
  });
  const auto report = eval::evaluate(index, records, cfg.p);
  fs::create_directories(out_dir);
  std::ofstream csv(out_dir / "metrics.csv", std::ios::binary | std::ios::trunc);
  if (!csv) throw Error(ErrorCode::io, "cannot write '" + (out_dir / "metrics.csv").string() + "'");
  eval::write_metrics_csv(csv, report);
  std::ofstream md(out_dir / "metrics.md", std::ios::binary | std::ios::trunc);
  md << eval::render_markdown(report);
  return report;
}

inline int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  if (cfg.trials == 1) {
    const auto report = evaluate_scores(cfg, cfg.scores, cfg.out);
    out << eval::render_markdown(report);
    out << "official_score," << eval::format_fixed(report.official_score) << '\n';
    return 0;
  }
  // Each trial retrains and rescores with its own seed and output tree.
  std::vector<eval::MetricsReport> reports;
  std::ostringstream quiet;
  for (int t = 0; t < cfg.trials; ++t) {
    RunConfig trial = cfg;
    trial.seed = cfg.seed + static_cast<std::uint64_t>(t);
    trial.detectors.seed = trial.seed;
    const std::string tag = "trial_" + std::to_string(t);
    trial.models = cfg.models / tag;
    trial.scores = cfg.scores / tag;
    trial.out = cfg.out / tag;
    cmd_train(trial, quiet);
    cmd_score(trial, quiet);
    reports.push_back(evaluate_scores(trial, trial.scores, trial.out));
    out << tag << " seed " << trial.seed << " official_score," << eval::format_fixed(reports.back().official_score) << '\n';
  }
  const auto summary = eval::summarize_trials(reports);
  const std::string md = eval::render_markdown(summary);
  fs::create_directories(cfg.out);
  std::ofstream(cfg.out / "metrics_trials.md", std::ios::binary | std::ios::trunc) << md;
  out << md;
  return 0;
}

inline int run_command(const RunConfig& cfg, std::ostream& out) {
  switch (cfg.command) {
    case Command::synth: return cmd_synth(cfg, out);
    case Command::train: return cmd_train(cfg, out);
    case Command::score: return cmd_score(cfg, out);
    case Command::eval: return cmd_eval(cfg, out);
  }
  throw Error(ErrorCode::usage, "unknown command");
}

}  // namespace asdbench::cli
