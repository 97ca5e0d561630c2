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

#ifndef DPDMPC_NUMERICS_H_
#define DPDMPC_NUMERICS_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace dpdmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws ValidationError naming `what` if any entry is NaN or infinite.
void RequireFinite(const Matrix& m, const std::string& what);

// Largest singular value of `m`, by power iteration on mᵀm from a
// deterministic start vector. Relative accuracy is about 1e-12.
double SpectralNorm(const Matrix& m);

// Elementwise max(v, 0): Euclidean projection onto the nonnegative orthant.
Vector ProjectNonneg(const Vector& v);

// Positive-definiteness test via Cholesky.
bool IsPositiveDefinite(const Matrix& m);

bool IsControllable(const Matrix& a, const Matrix& b);

struct RiccatiSolution {
  Matrix p;
  Matrix k;  // u = k x
  int iterations = 0;
  double residual = 0.0;  // ‖(A+BK)ᵀP(A+BK) − P + Q + KᵀRK‖_max
};

// Discrete algebraic Riccati equation by fixed-point iteration of the Riccati
// map from P = Q. Returns the stabilizing P and the gain
// K = −(R + BᵀPB)⁻¹BᵀPA.
RiccatiSolution SolveDare(const Matrix& a, const Matrix& b, const Matrix& q,
                          const Matrix& r);

// Residual of the closed-loop Lyapunov form of the Riccati equation, max-abs
// entry.
double DareResidual(const Matrix& a, const Matrix& b, const Matrix& q,
                    const Matrix& r, const Matrix& p, const Matrix& k);

// min ½uᵀHu + fᵀu  s.t.  Gu ≤ h.
struct QpProblem {
  Matrix H;
  Vector f;
  Matrix G;
  Vector h;
};

struct QpSolution {
  Vector u;
  Vector multipliers;  // one per row of G, all ≥ 0
  int iterations = 0;
  double primal_residual = 0.0;        // max(0, max(Gu − h))
  double stationarity_residual = 0.0;  // ‖Hu + f + Gᵀμ‖_∞
};

// Strictly convex dense QP solver (dual active-set method of Goldfarb and
// Idnani). The factorization of H and the scaled constraint normals are
// computed once, so repeated solves with different (f, h) are cheap.
class DenseQpSolver {
 public:
  DenseQpSolver(const Matrix& hessian, const Matrix& constraints);

  // Throws InfeasibleProblemError if {u : Gu ≤ h} is empty and
  // ConvergenceError if the active-set loop exceeds its cap.
  QpSolution Solve(const Vector& f, const Vector& h) const;

  int dim() const { return static_cast<int>(hessian_.rows()); }
  int num_constraints() const { return static_cast<int>(g_.rows()); }

 private:
  Matrix hessian_;
  Matrix g_;
  Eigen::LLT<Matrix> llt_;
  Matrix scaled_normals_;  // L⁻¹Gᵀ, one column per constraint
};

// Solves `problem` and certifies the answer: primal infeasibility and KKT
// stationarity residual must both be ≤ tol, otherwise SolverError.
QpSolution SolveQp(const QpProblem& problem, double tol = 1e-8);

enum class LpStatus { kOptimal, kUnbounded, kInfeasible };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
};

// max cᵀx  s.t.  Gx ≤ h. Solved through the standard-form dual
// min hᵀy, Gᵀy = c, y ≥ 0 with a two-phase simplex (Bland's rule). The
// reported value is exact under strong duality; kUnbounded is returned when
// the dual is infeasible, which for a nonempty polytope means the primal is
// unbounded in direction c.
LpSolution MaximizeLinear(const Vector& c, const Matrix& g, const Vector& h);

}  // namespace dpdmpc

#endif  // DPDMPC_NUMERICS_H_
