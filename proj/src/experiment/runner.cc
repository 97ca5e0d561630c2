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

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>

#include "csv.h"
#include "dpdmpc/consensus.h"
#include "dpdmpc/errors.h"
#include "dpdmpc/experiment.h"
#include "dpdmpc/privacy.h"

namespace dpdmpc {
namespace {

// Runs job(0..n−1) on a small pool. Results are stored by index, so the
// outcome does not depend on scheduling; the first failure by index is
// rethrown.
void ParallelFor(int n, const std::function<void(int)>& job) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min<int>(n, static_cast<int>(hw));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[static_cast<size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

PlanConfig MakePlan(const ExperimentConfig& cfg, const WeightMatrix& w) {
  PlanConfig plan;
  plan.schedule = cfg.schedule;
  plan.iterations = cfg.iterations;
  plan.consensus = DefaultConsensusParams(w);
  if (cfg.consensus_iota) plan.consensus.iota = *cfg.consensus_iota;
  plan.consensus_tol = cfg.consensus_tol;
  plan.consensus_max_rounds = cfg.consensus_max_rounds;
  plan.decompose_spread = cfg.decompose_spread;
  return plan;
}

RunSummary Summarize(int run, std::uint64_t seed, const TrajectoryLog& log) {
  RunSummary s;
  s.run = run;
  s.seed = seed;
  s.violations = log.violations;
  s.fallbacks = log.fallbacks;
  s.terminal_entry = log.terminal_entry;
  s.recursive_feasibility_ok = log.recursive_feasibility_ok;
  for (const StepRecord& r : log.steps) {
    s.max_abs_global = std::max(s.max_abs_global, r.global_value.maxCoeff());
  }
  return s;
}

std::vector<TrajectoryLog> RunSeeds(const ExperimentConfig& cfg,
                                    const DmpcProblem& problem,
                                    const WeightMatrix& w, Strategy strategy) {
  std::vector<TrajectoryLog> logs(static_cast<size_t>(cfg.runs));
  ParallelFor(cfg.runs, [&](int run) {
    ClosedLoopConfig cl;
    cl.strategy = strategy;
    cl.steps = cfg.steps;
    cl.x0 = cfg.x0;
    cl.plan = MakePlan(cfg, w);
    cl.plan.seed = cfg.seed + static_cast<std::uint64_t>(run);
    logs[static_cast<size_t>(run)] = RunClosedLoop(problem, w, cl);
  });
  return logs;
}

void WriteTrajectories(const std::filesystem::path& path,
                       const DmpcProblem& problem,
                       const std::vector<TrajectoryLog>& logs) {
  std::ofstream out = OpenCsv(path);
  const Subsystem& s0 = problem.subsystems.front();
  TrajectoryLog::WriteCsvHeader(out, s0.n(), s0.m(), problem.p());
  for (size_t r = 0; r < logs.size(); ++r) {
    logs[r].WriteCsv(out, static_cast<int>(r));
  }
}

// Per (t, subsystem): mean and population variance across runs of every
// state and input entry.
void WriteAggregates(const std::filesystem::path& path,
                     const std::vector<TrajectoryLog>& logs) {
  std::ofstream out = OpenCsv(path);
  if (logs.empty() || logs.front().steps.empty()) {
    out << "mpc.t,mpc.subsystem\n";
    return;
  }
  const StepRecord& first = logs.front().steps.front();
  const Eigen::Index n = first.x.front().size();
  const Eigen::Index m = first.applied.front().size();
  out << "mpc.t,mpc.subsystem";
  for (Eigen::Index j = 0; j < n; ++j) {
    out << ",mpc.x[" << j << "].mean,mpc.x[" << j << "].var";
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    out << ",mpc.u[" << j << "].mean,mpc.u[" << j << "].var";
  }
  out << "\n";
  const size_t steps = logs.front().steps.size();
  const double runs = static_cast<double>(logs.size());
  for (size_t t = 0; t < steps; ++t) {
    for (size_t i = 0; i < first.x.size(); ++i) {
      Vector xs = Vector::Zero(n), xq = Vector::Zero(n);
      Vector us = Vector::Zero(m), uq = Vector::Zero(m);
      for (const TrajectoryLog& log : logs) {
        const StepRecord& r = log.steps[t];
        xs += r.x[i];
        xq += r.x[i].cwiseAbs2();
        us += r.applied[i];
        uq += r.applied[i].cwiseAbs2();
      }
      out << t << "," << i;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double mean = xs(j) / runs;
        out << "," << mean << "," << std::max(0.0, xq(j) / runs - mean * mean);
      }
      for (Eigen::Index j = 0; j < m; ++j) {
        const double mean = us(j) / runs;
        out << "," << mean << "," << std::max(0.0, uq(j) / runs - mean * mean);
      }
      out << "\n";
    }
  }
}

void WriteSummary(const std::filesystem::path& path,
                  const ExperimentResult& res) {
  std::ofstream out = OpenCsv(path);
  out << "mpc.strategy,mpc.run,mpc.seed,mpc.violations,mpc.fallbacks,"
         "mpc.terminal_entry,mpc.recursive_feasibility,mpc.max_global\n";
  auto rows = [&](const char* name, const std::vector<RunSummary>& runs) {
    for (const RunSummary& s : runs) {
      out << name << "," << s.run << "," << s.seed << "," << s.violations
          << "," << s.fallbacks << "," << s.terminal_entry << ","
          << (s.recursive_feasibility_ok ? 1 : 0) << "," << s.max_abs_global
          << "\n";
    }
  };
  rows(res.mode == Mode::kPlain ? "plain" : "private", res.private_runs);
  rows("baseline", res.baseline_runs);
}

void RunBudget(const ExperimentConfig& cfg, const WeightMatrix& w,
               const std::filesystem::path& out_dir, ExperimentResult* res) {
  const double cg2 = ComputeCgBound(cfg.problem, Norm::kL2);
  const double cg1 = ComputeCgBound(cfg.problem, Norm::kL1);
  const double c = cfg.adjacency_constant.value_or(
      2.0 * cg1 / cfg.schedule.Chi(0));
  const double l_bar = w.min_abs_diagonal();
  const BudgetAccount acct =
      BuildBudgetAccount(cfg.budget_horizon, c, cfg.schedule, l_bar);
  const EpsilonResult inf = EpsilonBoundInfinite(c, cfg.schedule, l_bar);
  if (out_dir.empty()) return;
  {
    std::ofstream out = OpenCsv(out_dir / "budget.csv");
    acct.WriteCsv(out);
  }
  std::ofstream out = OpenCsv(out_dir / "budget_summary.csv");
  out << "privacy.cg_l2,privacy.cg_l1,privacy.C,privacy.L_bar,"
         "privacy.horizon,privacy.epsilon_T,privacy.epsilon_inf,"
         "privacy.epsilon_inf_extrapolated,privacy.diverges\n";
  out << cg2 << "," << cg1 << "," << c << "," << l_bar << ","
      << cfg.budget_horizon << "," << acct.rows.back().cumulative << ","
      << inf.value << "," << (inf.extrapolated ? 1 : 0) << ","
      << (inf.diverges ? 1 : 0) << "\n";
  res->files.push_back((out_dir / "budget.csv").string());
  res->files.push_back((out_dir / "budget_summary.csv").string());
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const std::filesystem::path& out_dir) {
  const WeightMatrix w(cfg.weights);
  ExperimentResult res;
  res.mode = cfg.mode;

  if (cfg.mode == Mode::kPrivate || cfg.mode == Mode::kCompare) {
    res.private_logs = RunSeeds(cfg, cfg.problem, w, Strategy::kPrivate);
  }
  if (cfg.mode == Mode::kCompare) {
    res.baseline_logs = RunSeeds(cfg, cfg.problem, w, Strategy::kBaseline);
  }
  if (cfg.mode == Mode::kPlain) {
    res.private_logs = RunSeeds(cfg, cfg.problem, w, Strategy::kBaselineClean);
  }
  for (size_t r = 0; r < res.private_logs.size(); ++r) {
    res.private_runs.push_back(Summarize(static_cast<int>(r),
                                         cfg.seed + r, res.private_logs[r]));
    res.private_violations += res.private_logs[r].violations;
  }
  for (size_t r = 0; r < res.baseline_logs.size(); ++r) {
    res.baseline_runs.push_back(Summarize(static_cast<int>(r),
                                          cfg.seed + r, res.baseline_logs[r]));
    res.baseline_violations += res.baseline_logs[r].violations;
  }

  if (cfg.mode == Mode::kPlain) {
    std::ofstream oracle;
    if (!out_dir.empty()) {
      oracle = OpenCsv(out_dir / "centralized.csv");
      oracle << "mpc.oracle.run,mpc.oracle.t,mpc.oracle.subsystem,"
                "mpc.oracle.u,mpc.oracle.applied\n";
    }
    for (size_t r = 0; r < res.private_logs.size(); ++r) {
      for (const StepRecord& step : res.private_logs[r].steps) {
        const CentralizedSolution best = SolveCentralized(cfg.problem, step.x);
        for (size_t i = 0; i < step.applied.size(); ++i) {
          const Eigen::Index m = step.applied[i].size();
          const Vector first = best.inputs[i].head(m);
          res.max_oracle_deviation =
              std::max(res.max_oracle_deviation,
                       (first - step.applied[i]).cwiseAbs().maxCoeff());
          if (oracle.is_open()) {
            oracle << r << "," << step.t << "," << i << "," << first(0) << ","
                   << step.applied[i](0) << "\n";
          }
        }
      }
    }
    if (oracle.is_open()) res.files.push_back((out_dir / "centralized.csv").string());
  }

  if (cfg.mode == Mode::kBudget || cfg.mode == Mode::kPrivate ||
      cfg.mode == Mode::kCompare) {
    RunBudget(cfg, w, out_dir, &res);
  }
  if (out_dir.empty() || cfg.mode == Mode::kBudget) return res;

  const std::string main_name =
      cfg.mode == Mode::kPlain ? "plain" : "private";
  WriteTrajectories(out_dir / ("trajectory_" + main_name + ".csv"),
                    cfg.problem, res.private_logs);
  WriteAggregates(out_dir / ("aggregate_" + main_name + ".csv"),
                  res.private_logs);
  res.files.push_back((out_dir / ("trajectory_" + main_name + ".csv")).string());
  res.files.push_back((out_dir / ("aggregate_" + main_name + ".csv")).string());
  if (cfg.mode == Mode::kCompare) {
    WriteTrajectories(out_dir / "trajectory_baseline.csv", cfg.problem,
                      res.baseline_logs);
    WriteAggregates(out_dir / "aggregate_baseline.csv", res.baseline_logs);
    std::ofstream out = OpenCsv(out_dir / "violations.csv");
    out << "mpc.run,mpc.seed,mpc.private_violations,mpc.baseline_violations\n";
    for (size_t r = 0; r < res.private_runs.size(); ++r) {
      out << r << "," << res.private_runs[r].seed << ","
          << res.private_runs[r].violations << ","
          << res.baseline_runs[r].violations << "\n";
    }
    res.files.push_back((out_dir / "trajectory_baseline.csv").string());
    res.files.push_back((out_dir / "aggregate_baseline.csv").string());
    res.files.push_back((out_dir / "violations.csv").string());
  }
  WriteSummary(out_dir / "summary.csv", res);
  res.files.push_back((out_dir / "summary.csv").string());
  return res;
}

}  // namespace dpdmpc
