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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "catch_amalgamated.hpp"

#include "asdbench/eval/metrics.hpp"
#include "asdbench/eval/report.hpp"
#include "asdbench/eval/score_files.hpp"

using namespace asdbench;
using namespace asdbench::eval;
using Catch::Matchers::WithinAbs;

namespace {

// Rank formulation of the strict-H AUC: for each anomaly, count normals
// strictly below it via a full scan. Independent of the library's sorting.
double oracle_auc(const std::vector<double>& neg, const std::vector<double>& pos, std::size_t top = 0) {
  std::vector<double> n = neg;
  std::sort(n.rbegin(), n.rend());
  if (top) n.resize(top);
  long hits = 0;
  for (double a : pos) hits += std::count_if(n.begin(), n.end(), [a](double x) { return x < a; });
  return static_cast<double>(hits) / static_cast<double>(n.size() * pos.size());
}

std::vector<double> tied_scores(std::mt19937_64& gen, std::size_t n) {
  std::uniform_int_distribution<int> level(0, 9);
  std::vector<double> v(n);
  for (auto& x : v) x = level(gen) * 0.25;
  return v;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::usage;
}

}  // namespace

TEST_CASE("decide uses a strict threshold") {
  CHECK(decide(1.2, 1.0) == Decision::anomaly);
  CHECK(decide(1.0, 1.0) == Decision::normal);
  CHECK(decide(-5.0, 0.0) == Decision::normal);
}

TEST_CASE("auc worked examples") {
  CHECK(auc(std::vector{0.1, 0.2}, std::vector{0.8, 0.9}) == 1.0);
  CHECK(auc(std::vector{1.0}, std::vector{1.0}) == 0.0);
  CHECK(auc(std::vector{0.4, 0.6}, std::vector{0.5, 0.7}) == 0.75);
  CHECK(brute_force_auc(std::vector{0.4, 0.6}, std::vector{0.5, 0.7}) == 0.75);
  CHECK(auc(std::vector{3.0, 3.0, 3.0}, std::vector{3.0, 3.0}) == 0.0);
  CHECK(code_of([] { auc(std::vector<double>{}, std::vector{1.0}); }) == ErrorCode::undefined_metric);
}

TEST_CASE("pauc worked examples") {
  const std::vector<double> neg{9, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(pauc_normal_count(10, 0.1) == 1);
  CHECK(pauc(neg, std::vector{10.0, 5.0}, 0.1) == 0.5);
  CHECK(pauc(neg, std::vector{10.0, 11.0}, 0.1) == 1.0);
  CHECK(code_of([] { pauc(std::vector{1.0, 2.0, 3.0, 4.0, 5.0}, std::vector{6.0}, 0.1); }) == ErrorCode::undefined_metric);
  CHECK(pauc_normal_count(50, 0.05) == 2);
  CHECK(pauc_normal_count(30, 0.1) == 3);
  CHECK(code_of([] { pauc_normal_count(10, 0.0); }) == ErrorCode::usage);
}

TEST_CASE("auc and pauc match the pairwise oracle on tied random sets") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::size_t> size(10, 60);
  for (int trial = 0; trial < 500; ++trial) {
    const auto neg = tied_scores(gen, size(gen));
    const auto pos = tied_scores(gen, size(gen));
    CHECK_THAT(auc(neg, pos), WithinAbs(oracle_auc(neg, pos), 1e-12));
    CHECK_THAT(auc(neg, pos), WithinAbs(brute_force_auc(neg, pos), 1e-12));
    const std::size_t top = neg.size() / 10;
    CHECK_THAT(pauc(neg, pos, 0.1), WithinAbs(oracle_auc(neg, pos, top), 1e-12));
    CHECK_THAT(pauc(neg, pos, 0.1), WithinAbs(brute_force_auc(neg, pos, 0.1), 1e-12));
  }
}

TEST_CASE("auc properties") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> neg(20), pos(15);
    for (auto& x : neg) x = z(gen);
    for (auto& x : pos) x = z(gen) + 0.5;
    // Swapping roles complements the AUC when there are no ties.
    CHECK_THAT(auc(neg, pos) + auc(pos, neg), WithinAbs(1.0, 1e-12));
    auto up = pos;
    up[trial % up.size()] += 1.0;
    CHECK(auc(neg, up) >= auc(neg, pos));
    auto raised = neg;
    raised[trial % raised.size()] += 1.0;
    CHECK(auc(raised, pos) <= auc(neg, pos));
  }
  // An exact tie scores below an epsilon-separated pair.
  CHECK(auc(std::vector{0.5, 0.1}, std::vector{0.5}) < auc(std::vector{0.5 - 1e-9, 0.1}, std::vector{0.5}));
}

TEST_CASE("official score") {
  CHECK(official_score(std::vector{0.7, 0.7, 0.7, 0.7}) == 0.7);
  CHECK_THAT(official_score(std::vector{0.5, 1.0}), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK(official_score(std::vector{0.9, 0.0, 0.8}) == 0.0);
  CHECK(code_of([] { official_score(std::vector{1.5}); }) == ErrorCode::validation);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 * (1 + trial % 12));
    for (auto& x : v) x = u(gen);
    const double omega = official_score(v);
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    CHECK(official_score(shuffled) == omega);
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    CHECK(omega >= *std::min_element(v.begin(), v.end()));
    CHECK(omega <= mean + 1e-15);
  }
}

namespace {

DatasetIndex labelled_index(int per_cell, int sections = 2) {
  DatasetIndex index;
  index.root = "root";
  int id = 0;
  for (int s = 0; s < sections; ++s) {
    for (Domain d : {Domain::source, Domain::target}) {
      for (Condition c : {Condition::normal, Condition::anomaly}) {
        for (int i = 0; i < per_cell; ++i) {
          ClipMeta m{"fan", s, d, Split::test, c, id++};
          index.entries.push_back({format_clip_path(m), m});
        }
      }
    }
  }
  index.finalize();
  return index;
}

}  // namespace

TEST_CASE("evaluate with oracle labels scores perfectly") {
  const auto index = labelled_index(20);
  std::vector<ScoreRecord> scores;
  for (const auto& e : index.entries) scores.push_back({e.meta, e.meta.condition == Condition::anomaly ? 1.0 : 0.0});
  const auto report = evaluate(index, scores, 0.1);
  REQUIRE(report.cells.size() == 4);
  for (const auto& c : report.cells) {
    CHECK(c.auc == 1.0);
    CHECK(c.pauc == 1.0);
    CHECK(c.n_neg == 20);
    CHECK(c.n_pos == 20);
  }
  CHECK(report.official_score == 1.0);

  std::ostringstream csv;
  write_metrics_csv(csv, report);
  CHECK(csv.str().rfind("machine,section,domain,auc,pauc,n_neg,n_pos\nfan,00,source,1.000000,1.000000,20,20\n", 0) == 0);
  CHECK(csv.str().find("official_score,1.000000\n") != std::string::npos);
  CHECK(render_markdown(report).find("| fan | 01 | 100.00 | 100.00 | 100.00 | 100.00 |") != std::string::npos);
}

TEST_CASE("evaluate under random scores stays near chance") {
  const auto index = labelled_index(100, 1);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u;
  int inside = 0, cells = 0;
  for (int run = 0; run < 50; ++run) {
    std::vector<ScoreRecord> scores;
    for (const auto& e : index.entries) scores.push_back({e.meta, u(gen)});
    for (const auto& c : evaluate(index, scores).cells) {
      inside += c.auc >= 0.4 && c.auc <= 0.6;
      ++cells;
    }
  }
  CHECK(inside >= cells * 95 / 100);
}

TEST_CASE("evaluate rejects missing, duplicate and unknown scores") {
  const auto index = labelled_index(3);
  std::vector<ScoreRecord> scores;
  for (const auto& e : index.entries) scores.push_back({e.meta, 0.0});
  const auto dropped = scores.back();
  scores.pop_back();
  try {
    evaluate(index, scores, 1.0);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::validation);
    CHECK(std::string(e.what()).find(format_clip_path(dropped.meta)) != std::string::npos);
  }
  scores.push_back(dropped);
  scores.push_back(dropped);
  CHECK(code_of([&] { evaluate(index, scores, 1.0); }) == ErrorCode::validation);
  scores.pop_back();
  scores.push_back({ClipMeta{"pump", 0, Domain::source, Split::test, Condition::normal, 0}, 0.0});
  CHECK(code_of([&] { evaluate(index, scores, 1.0); }) == ErrorCode::validation);
}

TEST_CASE("metric value does not depend on tie order") {
  const auto index = labelled_index(10, 1);
  std::vector<ScoreRecord> a, b;
  for (const auto& e : index.entries) {
    const double s = (e.meta.clip_id % 3) * 0.5;
    a.push_back({e.meta, s});
  }
  b.assign(a.rbegin(), a.rend());
  const auto ra = evaluate(index, a), rb = evaluate(index, b);
  for (std::size_t i = 0; i < ra.cells.size(); ++i) {
    CHECK(ra.cells[i].auc == rb.cells[i].auc);
    CHECK(ra.cells[i].pauc == rb.cells[i].pauc);
  }
}

TEST_CASE("score files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "asdbench_score_files";
  std::filesystem::remove_all(dir);
  const auto index = labelled_index(4);
  std::vector<ScoreRecord> scores;
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  for (const auto& e : index.entries) scores.push_back({e.meta, z(gen) * 1e3});
  const auto files = write_score_files(dir, scores);
  CHECK(files.size() == 4);
  CHECK(files.front().filename() == "anomaly_score_fan_section_00_source.csv");
  auto back = read_score_dir(dir);
  CHECK(back.size() == scores.size());
  auto key = [](const ScoreRecord& r) { return r.meta; };
  std::sort(scores.begin(), scores.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
  std::sort(back.begin(), back.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
  for (std::size_t i = 0; i < scores.size(); ++i) {
    CHECK(back[i].meta == scores[i].meta);
    CHECK(back[i].score == scores[i].score);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("trial summary reports mean and spread") {
  const auto index = labelled_index(10, 1);
  std::vector<MetricsReport> reports;
  for (int t = 0; t < 3; ++t) {
    std::vector<ScoreRecord> scores;
    for (const auto& e : index.entries) {
      scores.push_back({e.meta, (e.meta.condition == Condition::anomaly ? 1.0 : 0.0) + (e.meta.clip_id % (t + 2)) * 0.4});
    }
    reports.push_back(evaluate(index, scores));
  }
  const auto summary = summarize_trials(reports);
  CHECK(summary.trials == 3);
  double mean = 0;
  for (const auto& r : reports) mean += r.cells[0].auc;
  CHECK_THAT(summary.cells[0].auc_mean, WithinAbs(mean / 3.0, 1e-12));
  CHECK(render_markdown(summary).find(" ± ") != std::string::npos);
}
