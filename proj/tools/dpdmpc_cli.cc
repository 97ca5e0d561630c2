// Copyright 2026 The dpdmpc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dpdmpc/errors.h"
#include "dpdmpc/experiment.h"

namespace {

int Run(int argc, char** argv) {
  CLI::App app{"Closed-loop simulator for private distributed MPC"};
  std::string config_path;
  std::optional<std::string> mode;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::optional<int> iters;
  std::string out_dir = "out";
  app.add_option("--config", config_path, "JSON experiment file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "plain | private | compare | budget")
      ->check(CLI::IsMember({"plain", "private", "compare", "budget"}));
  app.add_option("--runs", runs, "number of seeded runs")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed of run 0");
  app.add_option("--steps", steps, "closed-loop steps T")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--iters", iters, "dual iterations per step")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  dpdmpc::ExperimentConfig cfg = dpdmpc::ParseConfig(config_path);
  if (mode) cfg.mode = dpdmpc::ParseMode(*mode);
  if (runs) cfg.runs = *runs;
  if (seed) cfg.seed = *seed;
  if (steps) cfg.steps = *steps;
  if (iters) cfg.iterations = *iters;

  const dpdmpc::ExperimentResult res = dpdmpc::RunExperiment(cfg, out_dir);
  std::cout << "mode " << dpdmpc::ModeName(cfg.mode) << "\n";
  if (cfg.mode == dpdmpc::Mode::kPrivate ||
      cfg.mode == dpdmpc::Mode::kCompare) {
    int fallbacks = 0;
    for (const auto& r : res.private_runs) fallbacks += r.fallbacks;
    std::cout << "private runs " << res.private_runs.size()
              << ", global violations " << res.private_violations
              << ", fallback steps " << fallbacks << "\n";
  }
  if (cfg.mode == dpdmpc::Mode::kCompare) {
    std::cout << "baseline runs " << res.baseline_runs.size()
              << ", global violations " << res.baseline_violations << "\n";
  }
  if (cfg.mode == dpdmpc::Mode::kPlain) {
    std::cout << "plain runs " << res.private_runs.size()
              << ", max deviation from centralized inputs "
              << res.max_oracle_deviation << "\n";
  }
  for (const std::string& f : res.files) std::cout << "wrote " << f << "\n";
  if (res.private_violations > 0 && cfg.mode != dpdmpc::Mode::kPlain) {
    std::cerr << "error: the private strategy violated the global "
                 "constraint\n";
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const dpdmpc::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const dpdmpc::SafetyViolation& e) {
    std::cerr << "safety violation at step " << e.step() << ": " << e.what()
              << "\n";
    return 4;
  } catch (const dpdmpc::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const dpdmpc::NetworkError& e) {
    std::cerr << "network error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
