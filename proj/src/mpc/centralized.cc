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

#include "dpdmpc/errors.h"
#include "dpdmpc/mpc.h"

namespace dpdmpc {

CentralizedSolution SolveCentralized(const DmpcProblem& problem,
                                     const States& states,
                                     double relaxation) {
  const int M = problem.num_subsystems();
  if (static_cast<int>(states.size()) != M) {
    throw ValidationError("centralized: one state per subsystem required");
  }
  Eigen::Index dim = 0;
  Eigen::Index local_rows = 0;
  for (const CondensedLocal& c : problem.condensed) {
    dim += c.ineq_G.cols();
    local_rows += c.ineq_G.rows();
  }
  const Eigen::Index d = problem.dual_dim();

  QpProblem qp;
  qp.H = Matrix::Zero(dim, dim);
  qp.f = Vector::Zero(dim);
  qp.G = Matrix::Zero(local_rows + d, dim);
  qp.h = Vector::Zero(local_rows + d);
  Vector coupled_bound =
      problem.b_eps + Vector::Constant(d, relaxation);
  Eigen::Index col = 0;
  Eigen::Index row = 0;
  for (int i = 0; i < M; ++i) {
    const CondensedLocal& c = problem.condensed[static_cast<size_t>(i)];
    const Vector& x = states[static_cast<size_t>(i)];
    const Eigen::Index ni = c.ineq_G.cols();
    const Eigen::Index ri = c.ineq_G.rows();
    qp.H.block(col, col, ni, ni) = c.cost_H;
    qp.f.segment(col, ni) = c.cost_f_map * x;
    qp.G.block(row, col, ri, ni) = c.ineq_G;
    qp.h.segment(row, ri) = c.IneqBound(x);
    qp.G.block(local_rows, col, d, ni) = c.coupling_E;
    coupled_bound -= c.coupling_e_map * x;
    col += ni;
    row += ri;
  }
  qp.h.tail(d) = coupled_bound;

  const QpSolution sol = SolveQp(qp);
  CentralizedSolution out;
  col = 0;
  for (int i = 0; i < M; ++i) {
    const CondensedLocal& c = problem.condensed[static_cast<size_t>(i)];
    const Eigen::Index ni = c.ineq_G.cols();
    out.inputs.push_back(sol.u.segment(col, ni));
    col += ni;
  }
  out.cost = LyapunovValue(problem, states, out.inputs);
  return out;
}

double LyapunovValue(const DmpcProblem& problem, const States& states,
                     const Sequences& sequences) {
  const int M = problem.num_subsystems();
  if (static_cast<int>(states.size()) != M ||
      static_cast<int>(sequences.size()) != M) {
    throw ValidationError("Lyapunov value: one state and plan per subsystem");
  }
  double v = 0.0;
  for (int i = 0; i < M; ++i) {
    v += EvalCost(problem.condensed[static_cast<size_t>(i)],
                  states[static_cast<size_t>(i)],
                  sequences[static_cast<size_t>(i)]);
  }
  return v;
}

}  // namespace dpdmpc
