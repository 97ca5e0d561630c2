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

#ifndef DPDMPC_PRIVACY_H_
#define DPDMPC_PRIVACY_H_

#include <ostream>
#include <vector>

#include "dpdmpc/dualgrad.h"
#include "dpdmpc/model.h"
#include "dpdmpc/network.h"

namespace dpdmpc {

enum class Norm { kL1, kL2 };

// Upper bound on ‖g_i(ũ)‖ over every subsystem, every state x ∈ X_i and
// every ũ ∈ Ũ_i(x). Each coordinate of f_i is maximized and minimized by LP
// over the joint (x, ũ) polytope; the coordinate-wise worst |g| values are
// then combined in the requested norm. Throws SolverError if an LP is
// unbounded or the joint polytope is empty.
double ComputeCgBound(const DmpcProblem& problem, Norm norm = Norm::kL2);

// Default adjacency-rate constant C = 2·C_g(ℓ1)/χ⁰.
double DefaultAdjacencyConstant(const DmpcProblem& problem,
                                const Schedule& schedule);

struct SensitivityResult {
  std::vector<double> delta;  // Δ⁰ .. Δᵀ, Δ⁰ = 0
  bool clamped = false;       // some 1 − L̄χᵏ < 0 was clamped to 0
};

// Δᵏ⁺¹ = (1 − L̄χᵏ)Δᵏ + Cγᵏχᵏ run as an equality. Throws ValidationError
// unless C > 0 and L̄ ∈ (0, 1].
SensitivityResult SensitivitySequence(int horizon, double c,
                                      const Schedule& schedule, double l_bar);

// ςᵏ = Σ_{s=1}^{k−1} Π_{q=s}^{k−1}(1 − χ^q L̄)γ^{s−1}χ^{s−1} + γ^{k−1}χ^{k−1},
// evaluated directly in O(k). Requires k ≥ 1.
double Varsigma(int k, const Schedule& schedule, double l_bar);

struct EpsilonResult {
  bool diverges = false;
  bool extrapolated = false;
  double value = 0.0;
  int terms = 0;  // summed terms; the tail estimate covers the rest
};

// Σ_{k=1}^{T} Cςᵏ/νᵏ.
EpsilonResult EpsilonBound(int horizon, double c, const Schedule& schedule,
                           double l_bar);

// T = ∞. Diverging schedules are flagged. Otherwise the first `terms` terms
// are summed and the tail is bounded with Δᵏ ≤ ρ·γᵏ, ρ = Δᵀ/γᵀ, and
// γᵏ ≤ c4/(c5·k):
//   Σ_{k>T} ≈ ρ·(c4/c5)·ln(1 + d1/(d2·T^d3)) / (d1·d3).
EpsilonResult EpsilonBoundInfinite(double c, const Schedule& schedule,
                                   double l_bar, int terms = 1000000);

struct BudgetRow {
  int k = 0;
  double chi = 0.0;
  double gamma = 0.0;
  double nu = 0.0;
  double varsigma = 0.0;
  double delta = 0.0;
  double term = 0.0;
  double cumulative = 0.0;
};

struct BudgetAccount {
  double c = 0.0;
  double l_bar = 0.0;
  std::vector<BudgetRow> rows;  // k = 1..T

  // Columns: k, χ, γ, ν, ς, Δ, term, cumulative ε.
  void WriteCsv(std::ostream& out) const;
};

// Rows use the recursion for ς (ςᵏ = Δᵏ/C).
BudgetAccount BuildBudgetAccount(int horizon, double c,
                                 const Schedule& schedule, double l_bar);

struct AttackEntry {
  int k = 0;
  int subsystem = 0;
  Vector estimate;             // ĝ_iᵏ
  Vector truth;                // g_i(ũ_iᵏ⁺¹), filled by ScoreAttack
  std::vector<bool> clipped;   // λ_iᵏ⁺¹ coordinate observed at exactly 0
  bool skipped = false;        // γᵏ = 0
  double error = 0.0;          // ‖ĝ − g‖∞ over unclipped coordinates
  int unclipped() const;
};

struct AttackResult {
  std::vector<AttackEntry> entries;

  // Columns: k, subsystem, error, clipped count.
  void WriteCsv(std::ostream& out) const;
};

// Treats every logged message as the sender's true λ, recomputes the mixed
// price λ̃_iᵏ from the public weights and inverts the projected dual step:
// ĝ_iᵏ = (λ_iᵏ⁺¹ − λ̃_iᵏ)/γᵏ, γᵏ read from the round's public values.
AttackResult EavesdropReconstruct(const ObservationLog& log,
                                  const WeightMatrix& weights);

// Fills truth and error from a full trace of the same run.
void ScoreAttack(const IterationTrace& trace, AttackResult* result);

}  // namespace dpdmpc

#endif  // DPDMPC_PRIVACY_H_
