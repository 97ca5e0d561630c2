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
#include <string>

#include "dpdmpc/errors.h"
#include "dpdmpc/privacy.h"

namespace dpdmpc {
namespace {

void CheckAccountInputs(double c, double l_bar) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ValidationError("adjacency constant C must be positive");
  }
  if (!(l_bar > 0.0) || l_bar > 1.0) {
    throw ValidationError("L_bar must lie in (0, 1]");
  }
}

// max and min of one linear functional over the joint (x, ũ) set.
std::pair<double, double> Range(const Vector& c, const Matrix& g,
                                const Vector& h) {
  const LpSolution hi = MaximizeLinear(c, g, h);
  const LpSolution lo = MaximizeLinear(-c, g, h);
  for (const LpSolution* s : {&hi, &lo}) {
    if (s->status == LpStatus::kUnbounded) {
      throw SolverError("C_g bound: coupling function unbounded over the "
                        "local constraint set");
    }
    if (s->status == LpStatus::kInfeasible) {
      throw SolverError("C_g bound: local constraint set is empty");
    }
  }
  return {hi.value, -lo.value};
}

}  // namespace

double ComputeCgBound(const DmpcProblem& problem, Norm norm) {
  const int M = problem.num_subsystems();
  double best = 0.0;
  for (int i = 0; i < M; ++i) {
    const CondensedLocal& c = problem.condensed[static_cast<size_t>(i)];
    const Polytope& xs = problem.subsystems[static_cast<size_t>(i)].state_set;
    const int n = c.n;
    const int nu = static_cast<int>(c.ineq_G.cols());
    // Variables (x, ũ): x ∈ X, ineq_G ũ − ineq_h_x x ≤ ineq_h_const.
    const Eigen::Index rows = xs.G.rows() + c.ineq_G.rows();
    Matrix g = Matrix::Zero(rows, n + nu);
    Vector h(rows);
    g.topLeftCorner(xs.G.rows(), n) = xs.G;
    h.head(xs.G.rows()) = xs.h;
    g.bottomLeftCorner(c.ineq_G.rows(), n) = -c.ineq_h_x;
    g.bottomRightCorner(c.ineq_G.rows(), nu) = c.ineq_G;
    h.tail(c.ineq_G.rows()) = c.ineq_h_const;

    const Eigen::Index d = c.coupling_E.rows();
    Vector worst(d);
    for (Eigen::Index r = 0; r < d; ++r) {
      Vector obj(n + nu);
      obj.head(n) = c.coupling_e_map.row(r).transpose();
      obj.tail(nu) = c.coupling_E.row(r).transpose();
      const auto [hi, lo] = Range(obj, g, h);
      const double shift = problem.b_eps(r) / M;
      worst(r) = std::max(std::abs(hi - shift), std::abs(lo - shift));
    }
    best = std::max(best, norm == Norm::kL1 ? worst.lpNorm<1>() : worst.norm());
  }
  return best;
}

double DefaultAdjacencyConstant(const DmpcProblem& problem,
                                const Schedule& schedule) {
  return 2.0 * ComputeCgBound(problem, Norm::kL1) / schedule.Chi(0);
}

SensitivityResult SensitivitySequence(int horizon, double c,
                                      const Schedule& schedule, double l_bar) {
  CheckAccountInputs(c, l_bar);
  if (horizon < 0) throw ValidationError("sensitivity horizon must be >= 0");
  SensitivityResult out;
  out.delta.reserve(static_cast<size_t>(horizon) + 1);
  out.delta.push_back(0.0);
  double delta = 0.0;
  for (int k = 0; k < horizon; ++k) {
    const double chi = schedule.Chi(k);
    double contraction = 1.0 - l_bar * chi;
    if (contraction < 0.0) {
      contraction = 0.0;
      out.clamped = true;
    }
    delta = contraction * delta + c * schedule.Gamma(k) * chi;
    out.delta.push_back(delta);
  }
  return out;
}

double Varsigma(int k, const Schedule& schedule, double l_bar) {
  if (k < 1) throw ValidationError("varsigma needs k >= 1");
  double sum = schedule.Gamma(k - 1) * schedule.Chi(k - 1);
  double product = 1.0;
  for (int s = k - 1; s >= 1; --s) {
    product *= 1.0 - schedule.Chi(s) * l_bar;
    sum += product * schedule.Gamma(s - 1) * schedule.Chi(s - 1);
  }
  return sum;
}

EpsilonResult EpsilonBound(int horizon, double c, const Schedule& schedule,
                           double l_bar) {
  if (horizon < 1) throw ValidationError("budget horizon must be >= 1");
  const SensitivityResult s = SensitivitySequence(horizon, c, schedule, l_bar);
  EpsilonResult out;
  for (int k = 1; k <= horizon; ++k) {
    out.value += s.delta[static_cast<size_t>(k)] / schedule.Nu(k);
  }
  out.terms = horizon;
  return out;
}

EpsilonResult EpsilonBoundInfinite(double c, const Schedule& schedule,
                                   double l_bar, int terms) {
  EpsilonResult out;
  if (!ValidateSchedule(schedule).finite_budget) {
    out.diverges = true;
    out.value = INFINITY;
    return out;
  }
  out = EpsilonBound(terms, c, schedule, l_bar);
  const SensitivityResult s = SensitivitySequence(terms, c, schedule, l_bar);
  const double rho = s.delta.back() / schedule.Gamma(terms);
  const double t = static_cast<double>(terms);
  const double tail =
      rho * (schedule.c4 / schedule.c5) *
      std::log1p(schedule.d1 / (schedule.d2 * std::pow(t, schedule.d3))) /
      (schedule.d1 * schedule.d3);
  out.value += tail;
  out.extrapolated = true;
  return out;
}

BudgetAccount BuildBudgetAccount(int horizon, double c,
                                 const Schedule& schedule, double l_bar) {
  if (horizon < 1) throw ValidationError("budget horizon must be >= 1");
  const SensitivityResult s = SensitivitySequence(horizon, c, schedule, l_bar);
  BudgetAccount acct;
  acct.c = c;
  acct.l_bar = l_bar;
  double cumulative = 0.0;
  for (int k = 1; k <= horizon; ++k) {
    BudgetRow row;
    row.k = k;
    row.chi = schedule.Chi(k);
    row.gamma = schedule.Gamma(k);
    row.nu = schedule.Nu(k);
    row.delta = s.delta[static_cast<size_t>(k)];
    row.varsigma = row.delta / c;
    row.term = row.delta / row.nu;
    cumulative += row.term;
    row.cumulative = cumulative;
    acct.rows.push_back(row);
  }
  return acct;
}

void BudgetAccount::WriteCsv(std::ostream& out) const {
  out << "privacy.k,privacy.chi,privacy.gamma,privacy.nu,privacy.varsigma,"
         "privacy.delta,privacy.term,privacy.epsilon\n";
  out << std::setprecision(17);
  for (const BudgetRow& r : rows) {
    out << r.k << "," << r.chi << "," << r.gamma << "," << r.nu << ","
        << r.varsigma << "," << r.delta << "," << r.term << ","
        << r.cumulative << "\n";
  }
}

}  // namespace dpdmpc
