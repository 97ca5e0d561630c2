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

#ifndef DPDMPC_EXPERIMENT_H_
#define DPDMPC_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dpdmpc/dualgrad.h"
#include "dpdmpc/model.h"
#include "dpdmpc/mpc.h"

namespace dpdmpc {

enum class Mode { kPlain, kPrivate, kCompare, kBudget };

Mode ParseMode(const std::string& name);
std::string ModeName(Mode mode);

struct ExperimentConfig {
  std::string name;
  DmpcProblem problem;
  Matrix weights;
  States x0;
  Schedule schedule;
  int iterations = 1500;
  double consensus_tol = 1e-8;
  int consensus_max_rounds = 500;
  double decompose_spread = -1.0;
  std::optional<double> consensus_iota;
  int steps = 30;
  int runs = 20;
  std::uint64_t seed = 1;
  Mode mode = Mode::kCompare;
  std::optional<double> adjacency_constant;
  int budget_horizon = 10000;
};

// Parses and validates a JSON experiment description. Every schema or
// validator failure is collected with its JSON path and reported together
// in one ValidationError.
ExperimentConfig ParseConfigText(const std::string& text,
                                 const std::string& source = "<config>");
ExperimentConfig ParseConfig(const std::filesystem::path& path);

struct RunSummary {
  int run = 0;
  std::uint64_t seed = 0;
  int violations = 0;
  int fallbacks = 0;
  int terminal_entry = -1;
  bool recursive_feasibility_ok = true;
  double max_abs_global = 0.0;  // max_t max_row Σ(Ψx x + Ψu u)
};

struct ExperimentResult {
  Mode mode = Mode::kCompare;
  std::vector<RunSummary> private_runs;
  std::vector<RunSummary> baseline_runs;
  std::vector<TrajectoryLog> private_logs;
  std::vector<TrajectoryLog> baseline_logs;
  int private_violations = 0;
  int baseline_violations = 0;
  double max_oracle_deviation = 0.0;  // plain mode, vs centralized inputs
  std::vector<std::string> files;
};

// Runs `config.runs` seeded closed loops (seed + run index) on a worker
// pool and writes CSV artifacts to `out_dir` when it is non-empty.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const std::filesystem::path& out_dir);

}  // namespace dpdmpc

#endif  // DPDMPC_EXPERIMENT_H_
