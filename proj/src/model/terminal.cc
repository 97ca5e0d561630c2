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
#include <limits>

#include "dpdmpc/errors.h"
#include "dpdmpc/model.h"

namespace dpdmpc {
namespace {

void Record(ConditionCheck& check, double margin) {
  check.worst_margin = std::min(check.worst_margin, margin);
}

TerminalSetReport CheckTerminalConditions(
    const DmpcProblem& problem, const std::vector<const Polytope*>& terminals,
    double tol) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  TerminalSetReport report;
  report.input_admissible.worst_margin = kInf;
  report.invariant.worst_margin = kInf;
  report.inside_state_set.worst_margin = kInf;
  const int M = problem.num_subsystems();
  const int p = problem.p();
  Vector coupled_sum = Vector::Zero(p);

  for (int i = 0; i < M; ++i) {
    const Subsystem& s = problem.subsystems[static_cast<size_t>(i)];
    const Polytope& xf = *terminals[static_cast<size_t>(i)];
    const Matrix closed = s.A + s.B * s.K;
    const Matrix row_map = problem.coupling.psi_x[static_cast<size_t>(i)] +
                           problem.coupling.psi_u[static_cast<size_t>(i)] * s.K;
    Vector row_max = Vector::Constant(p, -kInf);
    for (const Vector& v : xf.Vertices()) {
      Record(report.input_admissible, s.input_set.Margin(s.K * v));
      Record(report.invariant, xf.Margin(closed * v));
      Record(report.inside_state_set, s.state_set.Margin(v));
      row_max = row_max.cwiseMax(row_map * v);
    }
    coupled_sum += row_max;
  }
  const double bound =
      1.0 - problem.epsilon * M * static_cast<double>(problem.horizon);
  report.coupled.worst_margin = (Vector::Constant(p, bound) - coupled_sum)
                                    .minCoeff();
  report.input_admissible.pass = report.input_admissible.worst_margin >= -tol;
  report.invariant.pass = report.invariant.worst_margin >= -tol;
  report.inside_state_set.pass = report.inside_state_set.worst_margin >= -tol;
  report.coupled.pass = report.coupled.worst_margin >= -tol;
  return report;
}

}  // namespace

TerminalSetReport ValidateTerminalSet(const DmpcProblem& problem, double tol) {
  std::vector<const Polytope*> terminals;
  for (const Subsystem& s : problem.subsystems) {
    if (!s.terminal_set.box) {
      throw ValidationError(
          "terminal set validation supports box terminal sets only");
    }
    terminals.push_back(&s.terminal_set);
  }
  return CheckTerminalConditions(problem, terminals, tol);
}

double LargestPassingTerminalScale(const DmpcProblem& problem,
                                   double alpha_max, double resolution) {
  auto passes = [&](double alpha) {
    std::vector<Polytope> scaled;
    for (const Subsystem& s : problem.subsystems) {
      if (!s.terminal_set.box) {
        throw ValidationError(
            "terminal set validation supports box terminal sets only");
      }
      scaled.push_back(s.terminal_set.Scaled(alpha));
    }
    std::vector<const Polytope*> ptrs;
    for (const Polytope& t : scaled) ptrs.push_back(&t);
    return CheckTerminalConditions(problem, ptrs, 1e-12).pass();
  };
  if (!passes(0.0)) return 0.0;
  if (passes(alpha_max)) return alpha_max;
  double lo = 0.0;
  double hi = alpha_max;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace dpdmpc
