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
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "asdbench/cli/commands.hpp"

namespace asdbench::cli {

/// One line, `error:<code>: <message>`, so scripts can split on the first two colons.
inline void print_error(std::ostream& err, ErrorCode code, std::string message) {
  std::replace(message.begin(), message.end(), '\n', ' ');
  err << "error:" << to_string(code) << ": " << message << '\n';
}

/// Parses argv, runs the chosen command and returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"asdbench: anomalous sound detection under domain shift"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_file, "JSON config file (flags take precedence)");
    sub->add_option("--seed", o.seed, "seed (falls back to ASDBENCH_SEED, then 0)");
  };
  auto add_data = [&](CLI::App* sub) { sub->add_option("--data", o.data, "dataset root"); };
  auto add_selection = [&](CLI::App* sub) {
    sub->add_option("--detector", o.detector, "ae | oe | gmm | knn | serial | ensemble");
    sub->add_option("--machine", o.machines, "restrict to machine type (repeatable)");
    sub->add_option("--models", o.models, "model directory");
  };
  auto add_training = [&](CLI::App* sub) {
    sub->add_option("--members", o.members, "ensemble members, comma separated");
    sub->add_flag("--adapt", o.adapt, "fit a separate target-domain inlier model");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic development corpus");
  add_common(synth);
  synth->add_option("--out", o.data, "output root");
  synth->add_option("--machines", o.n_machines, "machine types");
  synth->add_option("--sections", o.sections, "sections per machine type");
  synth->add_option("--source-train-clips", o.source_train_clips, "source training clips per section");
  synth->add_option("--target-train-clips", o.target_train_clips, "target training clips per section");
  synth->add_option("--test-clips", o.test_clips, "test clips per section, domain and condition");
  synth->add_flag("--identical-sections", o.identical_sections, "give every section the same acoustics");
  synth->add_flag("--force", o.force, "overwrite a non-empty output directory");

  CLI::App* train = app.add_subcommand("train", "train one scorer per machine type");
  add_common(train);
  add_data(train);
  add_selection(train);
  add_training(train);

  CLI::App* score = app.add_subcommand("score", "score test clips into challenge-format CSVs");
  add_common(score);
  add_data(score);
  add_selection(score);
  score->add_option("--scores", o.scores, "score directory");

  CLI::App* evalc = app.add_subcommand("eval", "compute AUC, pAUC and the official score");
  add_common(evalc);
  add_data(evalc);
  add_selection(evalc);
  add_training(evalc);
  evalc->add_option("--scores", o.scores, "score directory");
  evalc->add_option("--out", o.out, "metrics directory (default: score directory)");
  evalc->add_option("--p", o.p, "pAUC false-positive-rate bound");
  evalc->add_option("--trials", o.trials, "retrain, rescore and evaluate with seeds seed..seed+T-1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, ErrorCode::usage, e.what());
    return exit_status(ErrorCode::usage);
  }

  Command command = Command::synth;
  if (train->parsed()) command = Command::train;
  if (score->parsed()) command = Command::score;
  if (evalc->parsed()) command = Command::eval;

  try {
    return run_command(resolve(command, o), out);
  } catch (const Error& e) {
    print_error(err, e.code(), e.what());
    return exit_status(e.code());
  } catch (const fs::filesystem_error& e) {
    print_error(err, ErrorCode::io, e.what());
    return exit_status(ErrorCode::io);
  } catch (const std::exception& e) {
    print_error(err, ErrorCode::validation, e.what());
    return exit_status(ErrorCode::validation);
  }
}

}  // namespace asdbench::cli
