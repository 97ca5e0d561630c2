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

#ifndef DPDMPC_MODEL_H_
#define DPDMPC_MODEL_H_

#include <optional>
#include <string>
#include <vector>

#include "dpdmpc/numerics.h"

namespace dpdmpc {

struct Box {
  Vector lower;
  Vector upper;
};

// {x : Gx ≤ h}. `box` is set when the rows are the axis-aligned bounds of
// that box (built by FromBox).
struct Polytope {
  Matrix G;
  Vector h;
  std::optional<Box> box;

  static Polytope FromBox(const Vector& lower, const Vector& upper);
  static Polytope FromInequalities(const Matrix& g, const Vector& h);

  int dim() const { return static_cast<int>(G.cols()); }
  bool Contains(const Vector& x, double tol = 0.0) const;
  // min over rows of h − Gx; negative when x is outside.
  double Margin(const Vector& x) const;
  // Box corners, 2^dim of them. Throws ValidationError for non-box sets.
  std::vector<Vector> Vertices() const;
  Polytope Scaled(double factor) const;
};

// Rejects unbounded polytopes (2·dim LPs over ±eᵢ) and, when
// `strict_interior`, polytopes that do not contain the origin in their
// interior. Otherwise only 0 ∈ P is required.
void ValidatePolytope(const Polytope& p, const std::string& name,
                      bool strict_interior);

struct Subsystem {
  Matrix A;
  Matrix B;
  Matrix Q;
  Matrix R;
  Matrix P;
  Matrix K;
  Polytope state_set;
  Polytope input_set;
  Polytope terminal_set;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

// Validates the data and fills P and K from the Riccati equation.
Subsystem MakeSubsystem(const Matrix& a, const Matrix& b, const Matrix& q,
                        const Matrix& r, Polytope state_set,
                        Polytope input_set, Polytope terminal_set);

struct GlobalCoupling {
  std::vector<Matrix> psi_x;  // p × n_i
  std::vector<Matrix> psi_u;  // p × m_i
  int p = 0;
};

// Condensed data for one subsystem over horizon N, decision ũ ∈ R^{mN}:
//   J(x, ũ)  = ½ũᵀ cost_H ũ + (cost_f_map x)ᵀũ + xᵀ cost_const_map x
//   Ũ(x)     = {ũ : ineq_G ũ ≤ ineq_h_const + ineq_h_x x}
//   f(x, ũ)  = coupling_E ũ + coupling_e_map x
//   x̃(1..N) = state_x_map x + state_u_map ũ
struct CondensedLocal {
  int n = 0;
  int m = 0;
  int horizon = 0;
  Matrix cost_H;
  Matrix cost_f_map;
  Matrix cost_const_map;
  Matrix ineq_G;
  Matrix ineq_h_x;
  Vector ineq_h_const;
  Matrix coupling_E;
  Matrix coupling_e_map;
  Matrix state_x_map;
  Matrix state_u_map;

  Vector IneqBound(const Vector& x) const {
    return ineq_h_const + ineq_h_x * x;
  }
};

CondensedLocal BuildCondensed(const Subsystem& s, const Matrix& psi_x,
                              const Matrix& psi_u, int horizon);

// Block ℓ = 1..N equals (1 − eps·M·ℓ)·1_p. Requires 0 ≤ eps < 1/(MN).
Vector TighteningVector(double eps, int num_subsystems, int horizon, int p);

struct DmpcProblem {
  std::vector<Subsystem> subsystems;
  GlobalCoupling coupling;
  int horizon = 0;
  double epsilon = 0.0;
  std::vector<CondensedLocal> condensed;
  Vector b_eps;

  int num_subsystems() const { return static_cast<int>(subsystems.size()); }
  int p() const { return coupling.p; }
  int dual_dim() const { return horizon * coupling.p; }
};

DmpcProblem BuildProblem(std::vector<Subsystem> subsystems,
                         GlobalCoupling coupling, int horizon, double epsilon);

using States = std::vector<Vector>;
using Sequences = std::vector<Vector>;

// Predicted states x̃(1..N) stacked.
Vector PredictStates(const CondensedLocal& c, const Vector& x,
                     const Vector& u_seq);
Vector EvalF(const CondensedLocal& c, const Vector& x, const Vector& u_seq);
// f_i(x, ũ) − b(ε)/M.
Vector EvalG(const CondensedLocal& c, const Vector& x, const Vector& u_seq,
             const Vector& b_eps, int num_subsystems);
double EvalCost(const CondensedLocal& c, const Vector& x,
                const Vector& u_seq);

// Local subproblem argmin J(x, ũ) + λᵀg(ũ) over Ũ(x). λ must be ≥ 0.
QpProblem LocalQpForDual(const CondensedLocal& c, const Vector& x,
                         const Vector& lambda);

struct ConditionCheck {
  bool pass = false;
  double worst_margin = 0.0;  // min over checked rows of (bound − value)
};

struct TerminalSetReport {
  ConditionCheck input_admissible;  // K v ∈ U
  ConditionCheck invariant;         // (A + BK) v ∈ X^f
  ConditionCheck coupled;           // Σ max_v (Ψx + ΨuK) v ≤ (1 − εMN)
  ConditionCheck inside_state_set;  // X^f ⊆ X
  bool pass() const {
    return input_admissible.pass && invariant.pass && coupled.pass &&
           inside_state_set.pass;
  }
};

// Vertex checks of the terminal conditions on box terminal sets. The coupled
// condition is checked with per-subsystem vertex maxima summed row-wise,
// which is sufficient. Throws ValidationError on non-box terminal sets.
TerminalSetReport ValidateTerminalSet(const DmpcProblem& problem,
                                      double tol = 1e-12);

// Largest α ∈ [0, alpha_max] such that scaling every terminal box by α
// passes ValidateTerminalSet, found by bisection to `resolution`.
double LargestPassingTerminalScale(const DmpcProblem& problem,
                                   double alpha_max = 10.0,
                                   double resolution = 1e-3);

struct FeasibilityReport {
  bool local_ok = true;
  bool global_ok = true;
  std::vector<double> local_margins;  // per subsystem, min(h(x) − Gũ)
  Vector global_slack;                // εM·1 − Σ g_i, one entry per row
  bool ok() const { return local_ok && global_ok; }
};

// Full feasibility of a joint plan: every ũ_i ∈ Ũ_i(x_i) and
// Σ_i g_i(ũ_i) ≤ εM·1, each within `tol`.
FeasibilityReport CheckFeasibility(const DmpcProblem& problem,
                                   const States& states,
                                   const Sequences& sequences,
                                   double tol = 1e-8);

}  // namespace dpdmpc

#endif  // DPDMPC_MODEL_H_
