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

#ifndef DPDMPC_MPC_H_
#define DPDMPC_MPC_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "dpdmpc/consensus.h"
#include "dpdmpc/dualgrad.h"
#include "dpdmpc/model.h"
#include "dpdmpc/network.h"

namespace dpdmpc {

// {ũ(1|t−1), …, ũ(N−1|t−1), K·x̃(N|t−1)}.
Vector ShiftFallback(const Vector& u_prev, const Vector& x_terminal_prev,
                     const Matrix& k);

struct CentralizedSolution {
  Sequences inputs;
  double cost = 0.0;
};

// min Σ J_i over ũ_i ∈ Ũ_i(x_i) with Σ_i f_i ≤ b(ε) + relaxation·1, solved
// as one QP over the stacked inputs. relaxation = 0 is the problem the dual
// iterations solve; relaxation = εM is the set accepted by the feasibility
// check.
CentralizedSolution SolveCentralized(const DmpcProblem& problem,
                                     const States& states,
                                     double relaxation = 0.0);

// Σ_i J_i(x_i, ũ_i).
double LyapunovValue(const DmpcProblem& problem, const States& states,
                     const Sequences& sequences);

struct ClosedLoopState {
  int t = 0;
  States x;
  Sequences prev_inputs;   // ũ_i(t−1), empty at t = 0
  States prev_terminal;    // x̃_i(N|t−1)
  bool has_previous() const { return !prev_inputs.empty(); }
};

enum class StepMode { kFresh, kFallback };

struct StepOutcome {
  StepMode mode = StepMode::kFresh;
  int consensus_rounds = 0;
  bool consensus_failed = false;
  int solver_iterations = 0;
  // εM·1 − Σ_i g_i of the solver output, from the simulator's direct sum.
  Vector slack;
};

struct PlanConfig {
  Schedule schedule;
  int iterations = 1500;
  ConsensusParams consensus;
  double consensus_tol = 1e-8;
  int consensus_max_rounds = 500;
  double decompose_spread = -1.0;
  double margin = -1.0;  // negative selects DefaultFeasibilityMargin
  std::uint64_t seed = 0;
  // Test hook applied to the solver output before the check.
  std::function<void(Sequences*)> perturb;
};

struct PlanResult {
  Sequences inputs;
  StepOutcome outcome;
};

// One step of the privacy-preserving strategy: private dual iterations,
// decomposed consensus on g_i, then the fresh plan if the averaged check
// passes and the shifted previous plan otherwise. At t = 0 a failed check
// throws InitializationError.
PlanResult PlanStep(const ClosedLoopState& state, const DmpcProblem& problem,
                    const WeightMatrix& weights, const PlanConfig& config);

// Baseline step: plain dual iterations (optionally with Laplace noise on
// the shared prices), result applied unconditionally.
Sequences PlanStepBaseline(const ClosedLoopState& state,
                           const DmpcProblem& problem,
                           const WeightMatrix& weights,
                           const PlanConfig& config, bool noisy_messages);

enum class Strategy {
  kPrivate,        // private iterations + consensus check + fallback
  kBaseline,       // plain iterations, noisy shared prices
  kBaselineClean,  // plain iterations, exact shared prices
};

struct ClosedLoopConfig {
  Strategy strategy = Strategy::kPrivate;
  int steps = 30;
  States x0;
  PlanConfig plan;
  bool check_recursive_feasibility = true;
  bool measure_suboptimality = false;
};

struct StepRecord {
  int t = 0;
  States x;
  std::vector<Vector> applied;  // u_i(t)
  Vector global_value;          // Σ_i Ψx x_i + Ψu u_i, one entry per row
  double lyapunov = 0.0;
  StepOutcome outcome;
  bool violation = false;       // some global_value entry > 1
  // Shift of the previous plan checked at x(t); unset at t = 0.
  bool shift_checked = false;
  bool shift_feasible = false;
  double suboptimality = 0.0;   // Σ J(applied) − Σ J*(relaxed)
};

struct TrajectoryLog {
  std::vector<StepRecord> steps;
  int violations = 0;
  int fallbacks = 0;
  int terminal_entry = -1;  // first t with every x_i(t) in its terminal box
  bool recursive_feasibility_ok = true;
  double eta = 0.0;         // max suboptimality when measured

  // Columns: t, subsystem, state entries, input entries, Σu row values,
  // Lyapunov value, step mode.
  void WriteCsv(std::ostream& out, int run = 0) const;
  static void WriteCsvHeader(std::ostream& out, int n, int m, int p);
};

// Runs `steps` steps. Every x_i(t) must lie in X_i and every applied plan in
// Ũ_i(x_i(t)) within 1e-8, otherwise SafetyViolation with the step index.
// Global-constraint violations at the applied inputs are counted.
TrajectoryLog RunClosedLoop(const DmpcProblem& problem,
                            const WeightMatrix& weights,
                            const ClosedLoopConfig& config);

}  // namespace dpdmpc

#endif  // DPDMPC_MPC_H_
