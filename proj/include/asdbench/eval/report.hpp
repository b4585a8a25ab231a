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
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "asdbench/corpus/dataset.hpp"
#include "asdbench/eval/metrics.hpp"

namespace asdbench::eval {

struct ScoreRecord {
  ClipMeta meta;
  double score = 0.0;
};

struct MetricCell {
  std::string machine;
  int section = 0;
  Domain domain = Domain::source;
  double auc = 0.0;
  double pauc = 0.0;
  std::size_t n_neg = 0;
  std::size_t n_pos = 0;
};

struct MetricsReport {
  std::vector<MetricCell> cells;  // sorted by (machine, section, domain)
  double official_score = 0.0;
  double p = 0.1;

  const MetricCell* find(const std::string& machine, int section, Domain d) const {
    for (const auto& c : cells) {
      if (c.machine == machine && c.section == section && c.domain == d) return &c;
    }
    return nullptr;
  }
};

inline std::vector<double> cell_values(const std::vector<MetricCell>& cells) {
  std::vector<double> v;
  for (const auto& c : cells) {
    v.push_back(c.auc);
    v.push_back(c.pauc);
  }
  return v;
}

namespace detail {

[[noreturn]] inline void fail_listing(const std::string& what, const std::vector<std::string>& items) {
  std::string msg = what + " (" + std::to_string(items.size()) + "):";
  for (std::size_t i = 0; i < items.size() && i < 20; ++i) msg += " " + items[i];
  if (items.size() > 20) msg += " ...";
  throw Error(ErrorCode::validation, msg);
}

}  // namespace detail

/// One AUC/pAUC cell per (machine, section, domain) over the test clips of
/// `index`. Every test clip must carry a label and exactly one score.
inline MetricsReport evaluate(const DatasetIndex& index, std::span<const ScoreRecord> scores, double p = 0.1) {
  std::map<ClipMeta, double> by_meta;
  std::vector<std::string> duplicates, unknown, missing, unlabeled;
  std::map<ClipMeta, std::string> test_paths;
  for (const auto& e : index.entries) {
    if (e.meta.split == Split::test) test_paths[e.meta] = e.path;
  }
  for (const auto& r : scores) {
    if (!std::isfinite(r.score)) throw Error(ErrorCode::validation, "non-finite score for " + format_clip_path(r.meta));
    if (!test_paths.count(r.meta)) {
      unknown.push_back(format_clip_path(r.meta));
      continue;
    }
    if (!by_meta.emplace(r.meta, r.score).second) duplicates.push_back(format_clip_path(r.meta));
  }
  if (!duplicates.empty()) detail::fail_listing("duplicate scores", duplicates);
  if (!unknown.empty()) detail::fail_listing("scores for clips not in the test set", unknown);

  using Key = std::tuple<std::string, int, Domain>;
  struct Group {
    std::vector<std::pair<double, int>> normal, anomaly;  // (score, clip id)
  };
  std::map<Key, Group> groups;
  for (const auto& [meta, path] : test_paths) {
    const auto it = by_meta.find(meta);
    if (it == by_meta.end()) {
      missing.push_back(path);
      continue;
    }
    if (meta.condition == Condition::unknown) {
      unlabeled.push_back(path);
      continue;
    }
    auto& g = groups[{meta.machine_type, meta.section, meta.domain}];
    (meta.condition == Condition::anomaly ? g.anomaly : g.normal).emplace_back(it->second, meta.clip_id);
  }
  if (!missing.empty()) detail::fail_listing("test clips without a score", missing);
  if (!unlabeled.empty()) detail::fail_listing("test clips without a condition label", unlabeled);
  if (groups.empty()) throw Error(ErrorCode::validation, "no labelled test clips to evaluate");

  MetricsReport report;
  report.p = p;
  for (auto& [key, g] : groups) {
    // Descending score, ties broken by clip id. The metric itself does not
    // depend on tie order.
    auto order = [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; };
    std::sort(g.normal.begin(), g.normal.end(), order);
    std::sort(g.anomaly.begin(), g.anomaly.end(), order);
    std::vector<double> neg, pos;
    for (const auto& x : g.normal) neg.push_back(x.first);
    for (const auto& x : g.anomaly) pos.push_back(x.first);
    const auto& [machine, section, domain] = key;
    if (neg.empty() || pos.empty()) {
      throw Error(ErrorCode::undefined_metric, "cell " + machine + "/" + std::to_string(section) + "/" +
                                                   std::string(to_string(domain)) + " lacks normal or anomalous clips");
    }
    report.cells.push_back({machine, section, domain, auc(neg, pos), pauc(neg, pos, p), neg.size(), pos.size()});
  }
  report.official_score = official_score(cell_values(report.cells));
  return report;
}

inline std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void write_metrics_csv(std::ostream& os, const MetricsReport& report) {
  os << "machine,section,domain,auc,pauc,n_neg,n_pos\n";
  for (const auto& c : report.cells) {
    char section[8];
    std::snprintf(section, sizeof section, "%02d", c.section);
    os << c.machine << ',' << section << ',' << to_string(c.domain) << ',' << format_fixed(c.auc) << ','
       << format_fixed(c.pauc) << ',' << c.n_neg << ',' << c.n_pos << '\n';
  }
  os << "official_score," << format_fixed(report.official_score) << '\n';
}

/// Mean and sample standard deviation of each cell over repeated trials.
struct CellStats {
  std::string machine;
  int section = 0;
  Domain domain = Domain::source;
  double auc_mean = 0, auc_std = 0, pauc_mean = 0, pauc_std = 0;
};

struct TrialSummary {
  std::vector<CellStats> cells;
  double official_mean = 0, official_std = 0;
  std::size_t trials = 0;
};

inline TrialSummary summarize_trials(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::usage, "summarize_trials: no reports");
  auto mean_std = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0};
  };
  TrialSummary out;
  out.trials = reports.size();
  for (std::size_t i = 0; i < reports.front().cells.size(); ++i) {
    const auto& ref = reports.front().cells[i];
    std::vector<double> aucs, paucs;
    for (const auto& r : reports) {
      const MetricCell* c = r.find(ref.machine, ref.section, ref.domain);
      if (!c) throw Error(ErrorCode::validation, "summarize_trials: trials disagree on cells");
      aucs.push_back(c->auc);
      paucs.push_back(c->pauc);
    }
    CellStats s{ref.machine, ref.section, ref.domain};
    std::tie(s.auc_mean, s.auc_std) = mean_std(aucs);
    std::tie(s.pauc_mean, s.pauc_std) = mean_std(paucs);
    out.cells.push_back(s);
  }
  std::vector<double> omegas;
  for (const auto& r : reports) omegas.push_back(r.official_score);
  std::tie(out.official_mean, out.official_std) = mean_std(omegas);
  return out;
}

namespace detail {

/// Per-section rows with Source/Target columns for AUC and pAUC, in percent.
template <typename Cell, typename Fmt>
std::string render_table(const std::vector<Cell>& cells, Fmt&& fmt) {
  std::map<std::pair<std::string, int>, std::pair<const Cell*, const Cell*>> rows;
  for (const auto& c : cells) {
    auto& slot = rows[{c.machine, c.section}];
    (c.domain == Domain::source ? slot.first : slot.second) = &c;
  }
  std::ostringstream os;
  os << "| Machine | Section | AUC Source [%] | AUC Target [%] | pAUC Source [%] | pAUC Target [%] |\n";
  os << "|---|---|---|---|---|---|\n";
  for (const auto& [key, slot] : rows) {
    char section[8];
    std::snprintf(section, sizeof section, "%02d", key.second);
    os << "| " << key.first << " | " << section << " | " << fmt(slot.first, true) << " | " << fmt(slot.second, true)
       << " | " << fmt(slot.first, false) << " | " << fmt(slot.second, false) << " |\n";
  }
  return os.str();
}

}  // namespace detail

inline std::string render_markdown(const MetricsReport& report) {
  std::string table = detail::render_table(report.cells, [](const MetricCell* c, bool is_auc) -> std::string {
    if (!c) return "-";
    return format_fixed(100.0 * (is_auc ? c->auc : c->pauc), 2);
  });
  return table + "\nOfficial score: " + format_fixed(100.0 * report.official_score, 2) + " % (p = " +
         format_fixed(report.p, 3) + ")\n";
}

inline std::string render_markdown(const TrialSummary& summary) {
  std::string table = detail::render_table(summary.cells, [](const CellStats* c, bool is_auc) -> std::string {
    if (!c) return "-";
    const double m = is_auc ? c->auc_mean : c->pauc_mean;
    const double s = is_auc ? c->auc_std : c->pauc_std;
    return format_fixed(100.0 * m, 2) + " ± " + format_fixed(100.0 * s, 2);
  });
  return table + "\nOfficial score: " + format_fixed(100.0 * summary.official_mean, 2) + " ± " +
         format_fixed(100.0 * summary.official_std, 2) + " % over " + std::to_string(summary.trials) + " trials\n";
}

}  // namespace asdbench::eval
