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

#include "dpdmpc/errors.h"
#include "dpdmpc/numerics.h"

namespace dpdmpc {
namespace {

constexpr int kMaxIterations = 10000;
constexpr double kStepTolerance = 1e-12;

Matrix GainFor(const Matrix& a, const Matrix& b, const Matrix& r,
               const Matrix& p) {
  const Matrix s = r + b.transpose() * p * b;
  return -s.ldlt().solve(b.transpose() * p * a);
}

// Newton correction: with closed = A + BK, solve
// closedᵀX·closed − X = −R(P) through the Kronecker form and add X to P.
// Quadratic convergence removes the linear-rate error left by the fixed
// point iteration.
bool NewtonRefine(const Matrix& a, const Matrix& b, const Matrix& q,
                  const Matrix& r, Matrix* p) {
  const Eigen::Index n = a.rows();
  const Matrix k = GainFor(a, b, r, *p);
  const Matrix closed = a + b * k;
  const Matrix res =
      closed.transpose() * *p * closed - *p + q + k.transpose() * r * k;
  const Eigen::Index nn = n * n;
  Matrix kron(nn, nn);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      kron.block(i * n, j * n, n, n) = closed(j, i) * closed.transpose();
    }
  }
  kron -= Matrix::Identity(nn, nn);
  const Vector rhs = -Eigen::Map<const Vector>(res.data(), nn);
  Eigen::PartialPivLU<Matrix> lu(kron);
  const Vector x = lu.solve(rhs);
  if (!x.allFinite()) return false;
  Matrix corr = Eigen::Map<const Matrix>(x.data(), n, n);
  *p += 0.5 * (corr + corr.transpose());
  return true;
}

constexpr Eigen::Index kMaxRefineDim = 30;

}  // namespace

double DareResidual(const Matrix& a, const Matrix& b, const Matrix& q,
                    const Matrix& r, const Matrix& p, const Matrix& k) {
  const Matrix closed = a + b * k;
  const Matrix res =
      closed.transpose() * p * closed - p + q + k.transpose() * r * k;
  return res.cwiseAbs().maxCoeff();
}

RiccatiSolution SolveDare(const Matrix& a, const Matrix& b, const Matrix& q,
                          const Matrix& r) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
      r.rows() != m || r.cols() != m) {
    throw ValidationError("SolveDare: dimension mismatch");
  }
  RequireFinite(a, "A");
  RequireFinite(b, "B");
  RequireFinite(q, "Q");
  RequireFinite(r, "R");
  if (!IsPositiveDefinite(q)) throw ValidationError("SolveDare: Q must be ≻ 0");
  if (!IsPositiveDefinite(r)) throw ValidationError("SolveDare: R must be ≻ 0");
  if (!IsControllable(a, b)) {
    throw ValidationError("SolveDare: (A, B) is not controllable");
  }

  const Matrix q_sym = 0.5 * (q + q.transpose());
  const Matrix r_sym = 0.5 * (r + r.transpose());
  Matrix p = q_sym;
  double step = 0.0;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const Matrix s = r_sym + b.transpose() * p * b;
    const Matrix bpa = b.transpose() * p * a;
    Matrix next = q_sym + a.transpose() * p * a -
                  bpa.transpose() * s.ldlt().solve(bpa);
    next = 0.5 * (next + next.transpose());
    step = (next - p).cwiseAbs().maxCoeff();
    p = std::move(next);
    if (!p.allFinite()) {
      throw ConvergenceError("SolveDare: Riccati iteration diverged", step);
    }
    if (step <= kStepTolerance * std::max(1.0, p.cwiseAbs().maxCoeff())) {
      if (n <= kMaxRefineDim) {
        double best = DareResidual(a, b, q_sym, r_sym, p,
                                   GainFor(a, b, r_sym, p));
        for (int refine = 0; refine < 3; ++refine) {
          Matrix trial = p;
          if (!NewtonRefine(a, b, q_sym, r_sym, &trial)) break;
          const double res = DareResidual(a, b, q_sym, r_sym, trial,
                                          GainFor(a, b, r_sym, trial));
          if (!(res < best)) break;
          best = res;
          p = std::move(trial);
        }
      }
      RiccatiSolution sol;
      sol.k = GainFor(a, b, r_sym, p);
      sol.p = p;
      sol.iterations = it;
      sol.residual = DareResidual(a, b, q_sym, r_sym, sol.p, sol.k);
      if (!IsPositiveDefinite(sol.p)) {
        throw SolverError("SolveDare: fixed point is not positive definite");
      }
      return sol;
    }
  }
  throw ConvergenceError("SolveDare: iteration cap reached", step);
}

}  // namespace dpdmpc
