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

#include <string>
#include <utility>

#include "dpdmpc/errors.h"
#include "dpdmpc/model.h"

namespace dpdmpc {

Subsystem MakeSubsystem(const Matrix& a, const Matrix& b, const Matrix& q,
                        const Matrix& r, Polytope state_set,
                        Polytope input_set, Polytope terminal_set) {
  if (a.rows() != a.cols() || b.rows() != a.rows()) {
    throw ValidationError("subsystem: A must be n×n and B n×m");
  }
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  if (state_set.dim() != n || terminal_set.dim() != n) {
    throw ValidationError("subsystem: state/terminal set dimension mismatch");
  }
  if (input_set.dim() != m) {
    throw ValidationError("subsystem: input set dimension mismatch");
  }
  ValidatePolytope(state_set, "state_set", /*strict_interior=*/true);
  ValidatePolytope(input_set, "input_set", /*strict_interior=*/true);
  ValidatePolytope(terminal_set, "terminal_set", /*strict_interior=*/false);

  const RiccatiSolution dare = SolveDare(a, b, q, r);
  if (dare.residual > 1e-8) {
    throw SolverError("subsystem: Riccati residual too large");
  }
  Subsystem s;
  s.A = a;
  s.B = b;
  s.Q = 0.5 * (q + q.transpose());
  s.R = 0.5 * (r + r.transpose());
  s.P = dare.p;
  s.K = dare.k;
  s.state_set = std::move(state_set);
  s.input_set = std::move(input_set);
  s.terminal_set = std::move(terminal_set);
  return s;
}

CondensedLocal BuildCondensed(const Subsystem& s, const Matrix& psi_x,
                              const Matrix& psi_u, int horizon) {
  if (horizon < 1) throw ValidationError("horizon must be ≥ 1");
  const int n = s.n();
  const int m = s.m();
  const int N = horizon;
  if (psi_x.cols() != n || psi_u.cols() != m || psi_x.rows() != psi_u.rows()) {
    throw ValidationError("coupling matrices do not match subsystem size");
  }
  const int p = static_cast<int>(psi_x.rows());

  // Φ block ℓ = A^ℓ, Γ block (ℓ, j) = A^{ℓ−1−j}B for j < ℓ (ℓ = 1..N).
  std::vector<Matrix> a_pow(static_cast<size_t>(N + 1));
  a_pow[0] = Matrix::Identity(n, n);
  for (int l = 1; l <= N; ++l) a_pow[static_cast<size_t>(l)] = s.A * a_pow[static_cast<size_t>(l - 1)];

  CondensedLocal c;
  c.n = n;
  c.m = m;
  c.horizon = N;
  c.state_x_map = Matrix::Zero(n * N, n);
  c.state_u_map = Matrix::Zero(n * N, m * N);
  for (int l = 1; l <= N; ++l) {
    c.state_x_map.middleRows((l - 1) * n, n) = a_pow[static_cast<size_t>(l)];
    for (int j = 0; j < l; ++j) {
      c.state_u_map.block((l - 1) * n, j * m, n, m) =
          a_pow[static_cast<size_t>(l - 1 - j)] * s.B;
    }
  }

  Matrix q_bar = Matrix::Zero(n * N, n * N);
  for (int l = 1; l < N; ++l) {
    q_bar.block((l - 1) * n, (l - 1) * n, n, n) = s.Q;
  }
  q_bar.block((N - 1) * n, (N - 1) * n, n, n) = s.P;
  Matrix r_bar = Matrix::Zero(m * N, m * N);
  for (int l = 0; l < N; ++l) r_bar.block(l * m, l * m, m, m) = s.R;

  const Matrix& phi = c.state_x_map;
  const Matrix& gamma = c.state_u_map;
  c.cost_H = 2.0 * (gamma.transpose() * q_bar * gamma + r_bar);
  c.cost_H = 0.5 * (c.cost_H + c.cost_H.transpose());
  c.cost_f_map = 2.0 * gamma.transpose() * q_bar * phi;
  c.cost_const_map = s.Q + phi.transpose() * q_bar * phi;

  // Ũ(x): x̃(ℓ) ∈ X for ℓ = 1..N−1, x̃(N) ∈ X^f, ũ(ℓ) ∈ U for ℓ = 0..N−1.
  const Polytope& xs = s.state_set;
  const Polytope& us = s.input_set;
  const Polytope& xf = s.terminal_set;
  const Eigen::Index rows = xs.G.rows() * (N - 1) + xf.G.rows() +
                            us.G.rows() * N;
  c.ineq_G = Matrix::Zero(rows, m * N);
  c.ineq_h_x = Matrix::Zero(rows, n);
  c.ineq_h_const = Vector::Zero(rows);
  Eigen::Index row = 0;
  for (int l = 1; l <= N; ++l) {
    const Polytope& set = l < N ? xs : xf;
    const Eigen::Index k = set.G.rows();
    c.ineq_G.middleRows(row, k) = set.G * gamma.middleRows((l - 1) * n, n);
    c.ineq_h_x.middleRows(row, k) = -set.G * phi.middleRows((l - 1) * n, n);
    c.ineq_h_const.segment(row, k) = set.h;
    row += k;
  }
  for (int l = 0; l < N; ++l) {
    const Eigen::Index k = us.G.rows();
    c.ineq_G.block(row, l * m, k, m) = us.G;
    c.ineq_h_const.segment(row, k) = us.h;
    row += k;
  }

  // f block ℓ = Ψx x̃(ℓ) + Ψu ũ(ℓ), ℓ = 0..N−1, with x̃(0) = x.
  c.coupling_E = Matrix::Zero(p * N, m * N);
  c.coupling_e_map = Matrix::Zero(p * N, n);
  for (int l = 0; l < N; ++l) {
    c.coupling_E.block(l * p, l * m, p, m) = psi_u;
    if (l == 0) {
      c.coupling_e_map.middleRows(0, p) = psi_x;
    } else {
      c.coupling_E.block(l * p, 0, p, m * N) +=
          psi_x * gamma.middleRows((l - 1) * n, n);
      c.coupling_e_map.middleRows(l * p, p) =
          psi_x * phi.middleRows((l - 1) * n, n);
    }
  }
  return c;
}

Vector TighteningVector(double eps, int num_subsystems, int horizon, int p) {
  if (num_subsystems < 1 || horizon < 1 || p < 1) {
    throw ValidationError("tightening: M, N and p must be ≥ 1");
  }
  const double limit = 1.0 / (static_cast<double>(num_subsystems) * horizon);
  if (!(eps >= 0.0) || !(eps < limit)) {
    throw ValidationError("epsilon must satisfy 0 ≤ ε < 1/(MN) = " +
                          std::to_string(limit));
  }
  Vector b(horizon * p);
  for (int l = 1; l <= horizon; ++l) {
    b.segment((l - 1) * p, p).setConstant(1.0 - eps * num_subsystems * l);
  }
  return b;
}

DmpcProblem BuildProblem(std::vector<Subsystem> subsystems,
                         GlobalCoupling coupling, int horizon,
                         double epsilon) {
  const int M = static_cast<int>(subsystems.size());
  if (M < 1) throw ValidationError("problem needs at least one subsystem");
  if (static_cast<int>(coupling.psi_x.size()) != M ||
      static_cast<int>(coupling.psi_u.size()) != M) {
    throw ValidationError("coupling: one (psi_x, psi_u) pair per subsystem");
  }
  for (int i = 0; i < M; ++i) {
    if (coupling.psi_x[static_cast<size_t>(i)].rows() != coupling.p ||
        coupling.psi_u[static_cast<size_t>(i)].rows() != coupling.p) {
      throw ValidationError("coupling: row count must equal p for subsystem " +
                            std::to_string(i));
    }
  }
  DmpcProblem prob;
  prob.b_eps = TighteningVector(epsilon, M, horizon, coupling.p);
  prob.horizon = horizon;
  prob.epsilon = epsilon;
  for (int i = 0; i < M; ++i) {
    prob.condensed.push_back(BuildCondensed(
        subsystems[static_cast<size_t>(i)],
        coupling.psi_x[static_cast<size_t>(i)],
        coupling.psi_u[static_cast<size_t>(i)], horizon));
  }
  prob.subsystems = std::move(subsystems);
  prob.coupling = std::move(coupling);
  return prob;
}

Vector PredictStates(const CondensedLocal& c, const Vector& x,
                     const Vector& u_seq) {
  return c.state_x_map * x + c.state_u_map * u_seq;
}

Vector EvalF(const CondensedLocal& c, const Vector& x, const Vector& u_seq) {
  if (x.size() != c.n || u_seq.size() != c.m * c.horizon) {
    throw ValidationError("EvalF: dimension mismatch");
  }
  return c.coupling_E * u_seq + c.coupling_e_map * x;
}

Vector EvalG(const CondensedLocal& c, const Vector& x, const Vector& u_seq,
             const Vector& b_eps, int num_subsystems) {
  if (b_eps.size() != c.coupling_E.rows()) {
    throw ValidationError("EvalG: tightening vector has wrong size");
  }
  return EvalF(c, x, u_seq) - b_eps / static_cast<double>(num_subsystems);
}

double EvalCost(const CondensedLocal& c, const Vector& x,
                const Vector& u_seq) {
  return 0.5 * u_seq.dot(c.cost_H * u_seq) + (c.cost_f_map * x).dot(u_seq) +
         x.dot(c.cost_const_map * x);
}

QpProblem LocalQpForDual(const CondensedLocal& c, const Vector& x,
                         const Vector& lambda) {
  if (lambda.size() != c.coupling_E.rows()) {
    throw ValidationError("LocalQpForDual: λ has wrong dimension");
  }
  if (lambda.size() > 0 && lambda.minCoeff() < 0.0) {
    throw ValidationError("LocalQpForDual: λ must be nonnegative");
  }
  QpProblem qp;
  qp.H = c.cost_H;
  qp.f = c.cost_f_map * x + c.coupling_E.transpose() * lambda;
  qp.G = c.ineq_G;
  qp.h = c.IneqBound(x);
  return qp;
}

}  // namespace dpdmpc
