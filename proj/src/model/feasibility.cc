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

FeasibilityReport CheckFeasibility(const DmpcProblem& problem,
                                   const States& states,
                                   const Sequences& sequences, double tol) {
  const int M = problem.num_subsystems();
  if (static_cast<int>(states.size()) != M ||
      static_cast<int>(sequences.size()) != M) {
    throw ValidationError("CheckFeasibility: one state and plan per subsystem");
  }
  FeasibilityReport report;
  Vector sum_g = Vector::Zero(problem.dual_dim());
  for (int i = 0; i < M; ++i) {
    const CondensedLocal& c = problem.condensed[static_cast<size_t>(i)];
    const Vector& x = states[static_cast<size_t>(i)];
    const Vector& u = sequences[static_cast<size_t>(i)];
    const Vector slack = c.IneqBound(x) - c.ineq_G * u;
    const double margin = slack.size() > 0
                              ? slack.minCoeff()
                              : std::numeric_limits<double>::infinity();
    report.local_margins.push_back(margin);
    if (margin < -tol) report.local_ok = false;
    sum_g += EvalG(c, x, u, problem.b_eps, M);
  }
  report.global_slack =
      Vector::Constant(sum_g.size(), problem.epsilon * M) - sum_g;
  report.global_ok = report.global_slack.minCoeff() >= -tol;
  return report;
}

}  // namespace dpdmpc
