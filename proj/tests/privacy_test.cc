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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "dpdmpc/errors.h"
#include "dpdmpc/privacy.h"
#include "reference_problem.h"

namespace dpdmpc {
namespace {

using testing::ReferenceConfig;

constexpr double kLBar = 0.5;

// Two copies of the single-subsystem plant sharing one upper bound on Σu,
// one step ahead, so every price coordinate binds.
DmpcProblem TwoAgentOneSided() {
  const DmpcProblem one = testing::SingleSubsystemProblem(0.2, 1);
  GlobalCoupling coupling = one.coupling;
  coupling.psi_x.push_back(coupling.psi_x[0]);
  coupling.psi_u.push_back(coupling.psi_u[0]);
  return BuildProblem({one.subsystems[0], one.subsystems[0]}, coupling,
                      one.horizon, 0.0);
}

Matrix PairWeights() {
  Matrix l(2, 2);
  l << -0.5, 0.5, 0.5, -0.5;
  return l;
}

// Joint (x, ũ) polytope of one subsystem, for the QP oracle below.
void JointSet(const DmpcProblem& prob, int i, Matrix* g, Vector* h) {
  const CondensedLocal& c = prob.condensed[static_cast<size_t>(i)];
  const Polytope& xs = prob.subsystems[static_cast<size_t>(i)].state_set;
  const Eigen::Index n = c.n;
  const Eigen::Index nu = c.ineq_G.cols();
  g->setZero(xs.G.rows() + c.ineq_G.rows(), n + nu);
  h->resize(g->rows());
  g->topLeftCorner(xs.G.rows(), n) = xs.G;
  h->head(xs.G.rows()) = xs.h;
  g->bottomLeftCorner(c.ineq_G.rows(), n) = -c.ineq_h_x;
  g->bottomRightCorner(c.ineq_G.rows(), nu) = c.ineq_G;
  h->tail(c.ineq_G.rows()) = c.ineq_h_const;
}

TEST(Sensitivity, FirstTermsByHand) {
  const Schedule s;
  const double c = 3.0;
  const SensitivityResult r = SensitivitySequence(3, c, s, kLBar);
  ASSERT_EQ(r.delta.size(), 4u);
  EXPECT_EQ(r.delta[0], 0.0);
  EXPECT_DOUBLE_EQ(r.delta[1], c * 5.0 * 2.0);
  const double d2 = (1 - kLBar * s.Chi(1)) * r.delta[1] + c * s.Gamma(1) * s.Chi(1);
  EXPECT_DOUBLE_EQ(r.delta[2], d2);
  EXPECT_FALSE(r.clamped);

  EXPECT_TRUE(SensitivitySequence(3, c, s, 1.0).clamped);
  EXPECT_THROW(SensitivitySequence(3, 0.0, s, kLBar), ValidationError);
  EXPECT_THROW(SensitivitySequence(3, c, s, 0.0), ValidationError);
  EXPECT_THROW(SensitivitySequence(3, c, s, 1.5), ValidationError);
}

TEST(Sensitivity, ClosedFormSumMatchesRecursion) {
  const Schedule s;
  const double c = 6.965;
  const SensitivityResult r = SensitivitySequence(2000, c, s, kLBar);
  for (int k = 1; k <= 2000; ++k) {
    const double direct = c * Varsigma(k, s, kLBar);
    EXPECT_NEAR(direct, r.delta[static_cast<size_t>(k)],
                1e-12 * r.delta[static_cast<size_t>(k)])
        << k;
  }
  EXPECT_THROW(Varsigma(0, s, kLBar), ValidationError);
}

TEST(Epsilon, GrowsWithShrinkingIncrementsAndScalesWithC) {
  const Schedule s;
  const double c = 2.0;
  double previous_window = INFINITY;
  double previous_value = 0.0;
  for (int t = 1000; t <= 8000; t += 1000) {
    const double value = EpsilonBound(t, c, s, kLBar).value;
    EXPECT_GT(value, previous_value);
    if (previous_value > 0) {
      EXPECT_LT(value - previous_value, previous_window);
      previous_window = value - previous_value;
    }
    previous_value = value;
  }
  EXPECT_NEAR(EpsilonBound(500, 2 * c, s, kLBar).value,
              2 * EpsilonBound(500, c, s, kLBar).value, 1e-9);
}

TEST(Epsilon, InfiniteHorizon) {
  const Schedule s;
  const EpsilonResult inf = EpsilonBoundInfinite(1.0, s, kLBar, 100000);
  EXPECT_FALSE(inf.diverges);
  EXPECT_TRUE(inf.extrapolated);
  EXPECT_TRUE(std::isfinite(inf.value));
  EXPECT_GT(inf.value, EpsilonBound(100000, 1.0, s, kLBar).value);

  Schedule constant = s;
  constant.d2 = 0.0;
  const EpsilonResult div = EpsilonBoundInfinite(1.0, constant, kLBar, 1000);
  EXPECT_TRUE(div.diverges);
  EXPECT_TRUE(std::isinf(div.value));
}

TEST(Budget, AccountRowsAgreeWithBound) {
  const Schedule s;
  const BudgetAccount acct = BuildBudgetAccount(300, 2.5, s, kLBar);
  ASSERT_EQ(acct.rows.size(), 300u);
  EXPECT_NEAR(acct.rows.back().cumulative,
              EpsilonBound(300, 2.5, s, kLBar).value, 1e-12);
  for (const BudgetRow& row : acct.rows) {
    EXPECT_NEAR(row.varsigma, Varsigma(row.k, s, kLBar),
                1e-12 * row.varsigma);
    EXPECT_DOUBLE_EQ(row.term, row.delta / row.nu);
  }
  std::ostringstream csv;
  acct.WriteCsv(csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
            "privacy.k,privacy.chi,privacy.gamma,privacy.nu,privacy.varsigma,"
            "privacy.delta,privacy.term,privacy.epsilon");
}

TEST(CgBound, MatchesRegularizedQpOracle) {
  const DmpcProblem& prob = ReferenceConfig().problem;
  double l1 = 0.0;
  double l2 = 0.0;
  for (int i = 0; i < prob.num_subsystems(); ++i) {
    const CondensedLocal& c = prob.condensed[static_cast<size_t>(i)];
    Matrix g;
    Vector h;
    JointSet(prob, i, &g, &h);
    const Eigen::Index dim = g.cols();
    const double reg = 1e-6;
    const Matrix hess = reg * Matrix::Identity(dim, dim);
    Vector worst(c.coupling_E.rows());
    for (Eigen::Index r = 0; r < worst.size(); ++r) {
      Vector obj(dim);
      obj << c.coupling_e_map.row(r).transpose(),
          c.coupling_E.row(r).transpose();
      const DenseQpSolver solver(hess, g);
      const QpSolution hi = solver.Solve(-obj, h);
      const QpSolution lo = solver.Solve(obj, h);
      ASSERT_LE(std::max(hi.primal_residual, lo.primal_residual), 1e-7);
      const double top = obj.dot(hi.u);
      const double bottom = obj.dot(lo.u);
      const double shift = prob.b_eps(r) / prob.num_subsystems();
      worst(r) = std::max(std::abs(top - shift), std::abs(bottom - shift));
    }
    l1 = std::max(l1, worst.lpNorm<1>());
    l2 = std::max(l2, worst.norm());
  }
  EXPECT_NEAR(ComputeCgBound(prob, Norm::kL1), l1, 1e-5);
  EXPECT_NEAR(ComputeCgBound(prob, Norm::kL2), l2, 1e-5);
  EXPECT_NEAR(DefaultAdjacencyConstant(prob, Schedule{}),
              2.0 * ComputeCgBound(prob, Norm::kL1) / 2.0, 1e-12);
}

TEST(CgBound, BoundsEveryObservedConstraintValue) {
  const auto& cfg = ReferenceConfig();
  const WeightMatrix w(cfg.weights);
  DualRunOptions opts;
  opts.iterations = 300;
  opts.trace = TraceLevel::kFull;
  opts.seed = 2;
  const IterationTrace trace =
      RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  const double bound = ComputeCgBound(cfg.problem, Norm::kL2);
  for (const IterationRecord& r : trace.records) {
    for (const Vector& g : r.g) EXPECT_LE(g.norm(), bound + 1e-9);
  }
}

TEST(Attack, RecoversPlainIteratesExactly) {
  const auto& cfg = ReferenceConfig();
  const WeightMatrix w(cfg.weights);
  ObservationLog log;
  DualRunOptions opts;
  opts.iterations = 400;
  opts.trace = TraceLevel::kFull;
  opts.log = &log;
  const IterationTrace trace =
      RunPlain(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  AttackResult attack = EavesdropReconstruct(log, w);
  ScoreAttack(trace, &attack);
  ASSERT_EQ(attack.entries.size(), 399u * 4u);
  int scored = 0;
  for (const AttackEntry& e : attack.entries) {
    EXPECT_LE(e.error, 1e-9) << e.k << " " << e.subsystem;
    scored += e.unclipped();
  }
  EXPECT_GT(scored, 0);
}

TEST(Attack, OneSidedCouplingGivesInteriorIterations) {
  const DmpcProblem prob = TwoAgentOneSided();
  const WeightMatrix w(PairWeights());
  Vector x(2);
  x << -0.3, -0.2;
  const States states{x, x};
  ObservationLog log;
  DualRunOptions opts;
  opts.iterations = 300;
  opts.trace = TraceLevel::kFull;
  opts.log = &log;
  opts.lambda0.assign(2, Vector::Constant(prob.dual_dim(), 1.0));
  const IterationTrace trace = RunPlain(prob, states, w, Schedule{}, opts);
  AttackResult attack = EavesdropReconstruct(log, w);
  ScoreAttack(trace, &attack);
  int interior = 0;
  for (const AttackEntry& e : attack.entries) {
    if (e.unclipped() != static_cast<int>(e.clipped.size())) continue;
    ++interior;
    EXPECT_LE((e.estimate - e.truth).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_GT(interior, 0);
}

TEST(Attack, PrivateMessagesDefeatReconstruction) {
  const auto& cfg = ReferenceConfig();
  const WeightMatrix w(cfg.weights);
  ObservationLog log;
  DualRunOptions opts;
  opts.iterations = 400;
  opts.trace = TraceLevel::kFull;
  opts.log = &log;
  opts.seed = 9;
  const IterationTrace trace =
      RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  AttackResult attack = EavesdropReconstruct(log, w);
  ScoreAttack(trace, &attack);
  std::vector<double> errors;
  for (const AttackEntry& e : attack.entries) {
    if (e.unclipped() > 0) errors.push_back(e.error);
  }
  ASSERT_FALSE(errors.empty());
  std::nth_element(errors.begin(), errors.begin() + errors.size() / 2,
                   errors.end());
  EXPECT_GT(errors[errors.size() / 2], 1e-3);
}

TEST(Attack, ZeroStepIsSkipped) {
  const auto& cfg = ReferenceConfig();
  const WeightMatrix w(cfg.weights);
  Schedule frozen = cfg.schedule;
  frozen.c4 = 0.0;
  ObservationLog log;
  DualRunOptions opts;
  opts.iterations = 5;
  opts.trace = TraceLevel::kFull;
  opts.log = &log;
  const IterationTrace trace = RunPlain(cfg.problem, cfg.x0, w, frozen, opts);
  AttackResult attack = EavesdropReconstruct(log, w);
  ScoreAttack(trace, &attack);
  for (const AttackEntry& e : attack.entries) {
    EXPECT_TRUE(e.skipped);
    EXPECT_EQ(e.error, 0.0);
  }
}

}  // namespace
}  // namespace dpdmpc
