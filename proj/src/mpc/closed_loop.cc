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
#include <cmath>
#include <iomanip>
#include <limits>
#include <string>
#include <utility>

#include "dpdmpc/errors.h"
#include "dpdmpc/mpc.h"

namespace dpdmpc {
namespace {

constexpr double kMembershipTol = 1e-8;
constexpr double kGlobalTol = 1e-9;

// Noise streams per step: private iterations, consensus, baseline.
std::uint64_t Stream(int t, int purpose) {
  return static_cast<std::uint64_t>(t) * 4 + static_cast<std::uint64_t>(purpose);
}

ConsensusParams ParamsOrDefault(const PlanConfig& config,
                                const WeightMatrix& weights) {
  if (config.consensus.a.size() == 0) return DefaultConsensusParams(weights);
  return config.consensus;
}

}  // namespace

Vector ShiftFallback(const Vector& u_prev, const Vector& x_terminal_prev,
                     const Matrix& k) {
  const Eigen::Index m = k.rows();
  if (m == 0 || u_prev.size() % m != 0 || u_prev.size() == 0 ||
      k.cols() != x_terminal_prev.size()) {
    throw ValidationError("shift: sequence or terminal state has wrong size");
  }
  Vector out(u_prev.size());
  const Eigen::Index tail = u_prev.size() - m;
  out.head(tail) = u_prev.tail(tail);
  out.tail(m) = k * x_terminal_prev;
  return out;
}

PlanResult PlanStep(const ClosedLoopState& state, const DmpcProblem& problem,
                    const WeightMatrix& weights, const PlanConfig& config) {
  const int M = problem.num_subsystems();
  DualRunOptions opts;
  opts.iterations = config.iterations;
  opts.seed = config.seed;
  opts.stream = Stream(state.t, 0);
  IterationTrace trace =
      RunPrivate(problem, state.x, weights, config.schedule, opts);
  Sequences fresh = std::move(trace.final_inputs);
  if (config.perturb) config.perturb(&fresh);

  PlanResult result;
  result.outcome.solver_iterations = config.iterations;
  std::vector<Vector> z0;
  Vector sum_g = Vector::Zero(problem.dual_dim());
  for (int i = 0; i < M; ++i) {
    const size_t s = static_cast<size_t>(i);
    z0.push_back(EvalG(problem.condensed[s], state.x[s], fresh[s],
                       problem.b_eps, M));
    sum_g += z0.back();
  }
  result.outcome.slack =
      Vector::Constant(sum_g.size(), problem.epsilon * M) - sum_g;

  ConsensusOptions copts;
  copts.tol = config.consensus_tol;
  copts.max_rounds = config.consensus_max_rounds;
  copts.spread = config.decompose_spread;
  copts.seed = config.seed;
  copts.stream = Stream(state.t, 1);
  const double margin = config.margin >= 0.0
                            ? config.margin
                            : DefaultFeasibilityMargin(config.consensus_tol, M);
  bool pass = false;
  try {
    const ConsensusResult cr = RunConsensus(
        z0, ParamsOrDefault(config, weights), weights.adjacency(), copts);
    result.outcome.consensus_rounds = cr.rounds;
    pass = std::all_of(cr.estimates.begin(), cr.estimates.end(),
                       [&](const Vector& avg) {
                         return CheckGlobalFeasibility(avg, problem.epsilon, M,
                                                       margin);
                       });
  } catch (const ConvergenceError&) {
    result.outcome.consensus_failed = true;
    result.outcome.consensus_rounds = config.consensus_max_rounds;
  }

  if (pass) {
    result.outcome.mode = StepMode::kFresh;
    result.inputs = std::move(fresh);
    return result;
  }
  if (!state.has_previous()) {
    throw InitializationError(
        "initial plan fails the global feasibility check (min slack " +
            std::to_string(result.outcome.slack.minCoeff()) + ")",
        state.t, result.outcome.slack.minCoeff());
  }
  result.outcome.mode = StepMode::kFallback;
  for (int i = 0; i < M; ++i) {
    const size_t s = static_cast<size_t>(i);
    result.inputs.push_back(ShiftFallback(state.prev_inputs[s],
                                          state.prev_terminal[s],
                                          problem.subsystems[s].K));
  }
  return result;
}

Sequences PlanStepBaseline(const ClosedLoopState& state,
                           const DmpcProblem& problem,
                           const WeightMatrix& weights,
                           const PlanConfig& config, bool noisy_messages) {
  DualRunOptions opts;
  opts.iterations = config.iterations;
  opts.seed = config.seed;
  opts.stream = Stream(state.t, 2);
  opts.noisy_messages = noisy_messages;
  IterationTrace trace =
      RunPlain(problem, state.x, weights, config.schedule, opts);
  return std::move(trace.final_inputs);
}

TrajectoryLog RunClosedLoop(const DmpcProblem& problem,
                            const WeightMatrix& weights,
                            const ClosedLoopConfig& config) {
  const int M = problem.num_subsystems();
  const int p = problem.p();
  if (static_cast<int>(config.x0.size()) != M) {
    throw ValidationError("closed loop: one initial state per subsystem");
  }
  if (config.steps < 0) throw ValidationError("closed loop: steps must be >= 0");

  ClosedLoopState state;
  state.x = config.x0;
  TrajectoryLog log;
  auto in_terminal = [&](const States& x) {
    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      if (!problem.subsystems[s].terminal_set.Contains(x[s], 1e-12)) {
        return false;
      }
    }
    return true;
  };

  for (int t = 0; t < config.steps; ++t) {
    state.t = t;
    StepRecord rec;
    rec.t = t;
    rec.x = state.x;
    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      const Subsystem& sub = problem.subsystems[s];
      if (state.x[s].size() != sub.n()) {
        throw ValidationError("closed loop: state " + std::to_string(i) +
                              " has wrong dimension");
      }
      const double margin = sub.state_set.Margin(state.x[s]);
      if (margin < -kMembershipTol) {
        throw SafetyViolation("state of subsystem " + std::to_string(i) +
                                  " left its state set",
                              t, margin);
      }
    }
    if (log.terminal_entry < 0 && in_terminal(state.x)) log.terminal_entry = t;

    if (config.check_recursive_feasibility && state.has_previous()) {
      Sequences shifted;
      for (int i = 0; i < M; ++i) {
        const size_t s = static_cast<size_t>(i);
        shifted.push_back(ShiftFallback(state.prev_inputs[s],
                                        state.prev_terminal[s],
                                        problem.subsystems[s].K));
      }
      rec.shift_checked = true;
      rec.shift_feasible = CheckFeasibility(problem, state.x, shifted).ok();
      if (!rec.shift_feasible) log.recursive_feasibility_ok = false;
    }

    Sequences plan;
    switch (config.strategy) {
      case Strategy::kPrivate: {
        PlanResult r = PlanStep(state, problem, weights, config.plan);
        plan = std::move(r.inputs);
        rec.outcome = std::move(r.outcome);
        break;
      }
      case Strategy::kBaseline:
        plan = PlanStepBaseline(state, problem, weights, config.plan, true);
        rec.outcome.solver_iterations = config.plan.iterations;
        break;
      case Strategy::kBaselineClean:
        plan = PlanStepBaseline(state, problem, weights, config.plan, false);
        rec.outcome.solver_iterations = config.plan.iterations;
        break;
    }
    if (rec.outcome.mode == StepMode::kFallback) ++log.fallbacks;

    const FeasibilityReport feas = CheckFeasibility(problem, state.x, plan);
    if (!feas.local_ok) {
      const double worst = *std::min_element(feas.local_margins.begin(),
                                             feas.local_margins.end());
      throw SafetyViolation("applied plan leaves a local constraint set", t,
                            worst);
    }

    rec.global_value = Vector::Zero(p);
    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      const int m = problem.subsystems[s].m();
      rec.applied.push_back(plan[s].head(m));
      rec.global_value += problem.coupling.psi_x[s] * state.x[s] +
                          problem.coupling.psi_u[s] * rec.applied.back();
    }
    rec.violation = rec.global_value.maxCoeff() > 1.0 + kGlobalTol;
    if (rec.violation) ++log.violations;
    rec.lyapunov = LyapunovValue(problem, state.x, plan);
    if (config.measure_suboptimality) {
      const CentralizedSolution best = SolveCentralized(
          problem, state.x, problem.epsilon * M);
      rec.suboptimality = rec.lyapunov - best.cost;
      log.eta = std::max(log.eta, rec.suboptimality);
    }

    States next;
    States terminal;
    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      const Subsystem& sub = problem.subsystems[s];
      next.push_back(sub.A * state.x[s] + sub.B * rec.applied[s]);
      terminal.push_back(
          PredictStates(problem.condensed[s], state.x[s], plan[s])
              .tail(sub.n()));
    }
    state.x = std::move(next);
    state.prev_inputs = std::move(plan);
    state.prev_terminal = std::move(terminal);
    log.steps.push_back(std::move(rec));
  }
  if (log.terminal_entry < 0 && in_terminal(state.x)) {
    log.terminal_entry = config.steps;
  }
  return log;
}

void TrajectoryLog::WriteCsvHeader(std::ostream& out, int n, int m, int p) {
  out << "mpc.run,mpc.t,mpc.subsystem";
  for (int j = 0; j < n; ++j) out << ",mpc.x[" << j << "]";
  for (int j = 0; j < m; ++j) out << ",mpc.u[" << j << "]";
  for (int r = 0; r < p; ++r) out << ",mpc.global[" << r << "]";
  out << ",mpc.lyapunov,mpc.mode\n";
}

void TrajectoryLog::WriteCsv(std::ostream& out, int run) const {
  out << std::setprecision(17);
  for (const StepRecord& r : steps) {
    for (size_t i = 0; i < r.x.size(); ++i) {
      out << run << "," << r.t << "," << i;
      for (Eigen::Index j = 0; j < r.x[i].size(); ++j) out << "," << r.x[i](j);
      for (Eigen::Index j = 0; j < r.applied[i].size(); ++j) {
        out << "," << r.applied[i](j);
      }
      for (Eigen::Index j = 0; j < r.global_value.size(); ++j) {
        out << "," << r.global_value(j);
      }
      out << "," << r.lyapunov << ","
          << (r.outcome.mode == StepMode::kFresh ? "fresh" : "fallback")
          << "\n";
    }
  }
}

}  // namespace dpdmpc
