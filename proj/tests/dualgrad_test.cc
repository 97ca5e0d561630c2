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

#include <cmath>
#include <sstream>

#include "dpdmpc/dualgrad.h"
#include "dpdmpc/errors.h"
#include "dpdmpc/mpc.h"
#include "reference_problem.h"

namespace dpdmpc {
namespace {

using testing::ReferenceConfig;
using testing::SingleSubsystemProblem;

States SingleState() {
  Vector x(2);
  x << -0.6, -0.2;
  return {x};
}

TEST(Schedule, ReferenceValues) {
  const Schedule s;
  EXPECT_DOUBLE_EQ(s.Chi(0), 2.0);
  EXPECT_DOUBLE_EQ(s.Gamma(0), 5.0);
  EXPECT_DOUBLE_EQ(s.Nu(0), 0.1);
  EXPECT_NEAR(s.Chi(100), 2.0 / (1.0 + 0.01 * std::pow(100.0, 0.9)), 1e-15);
  EXPECT_NEAR(s.Gamma(100), 5.0 / 11.0, 1e-15);
  EXPECT_NEAR(s.Nu(1000), 0.1 + 0.001 * std::pow(1000.0, 0.1), 1e-15);

  const ScheduleReport report = ValidateSchedule(s);
  EXPECT_TRUE(report.converges);
  EXPECT_TRUE(report.noise_condition);
  EXPECT_TRUE(report.finite_budget);
  EXPECT_TRUE(report.reasons.empty());
}

TEST(Schedule, RejectsNonSummableFamilies) {
  Schedule slow;
  slow.c3 = 0.4;
  EXPECT_FALSE(ValidateSchedule(slow).converges);
  EXPECT_FALSE(ValidateSchedule(slow).reasons.empty());

  Schedule constant_noise;
  constant_noise.d2 = 0.0;
  const ScheduleReport r = ValidateSchedule(constant_noise);
  EXPECT_TRUE(r.converges);
  EXPECT_FALSE(r.finite_budget);

  Schedule loud;
  loud.c3 = 0.6;
  loud.d3 = 0.15;
  EXPECT_FALSE(ValidateSchedule(loud).noise_condition);

  Schedule negative;
  negative.c4 = -1.0;
  EXPECT_FALSE(ValidateSchedule(negative).converges);
}

TEST(Noise, UniformStaysInsideOpenInterval) {
  NoiseSource rng(1, 2);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Noise, LaplaceMomentsOverAMillionDraws) {
  const double nu = 0.7;
  NoiseSource rng(42, 0);
  const int n = 1000000;
  const Vector x = SampleLaplace(nu, n, rng);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / (n - 1);
  const double abs_mean = x.cwiseAbs().mean();
  // Var = 2ν², E|X| = ν; standard error of the mean is ν√2/√n.
  EXPECT_NEAR(mean, 0.0, 5.0 * nu * std::sqrt(2.0 / n));
  EXPECT_NEAR(var / (2 * nu * nu), 1.0, 0.01);
  EXPECT_NEAR(abs_mean / nu, 1.0, 0.005);
}

TEST(Noise, QuantileIsTheInverseCdf) {
  const double nu = 0.3;
  EXPECT_EQ(LaplaceQuantile(0.5, nu), 0.0);
  for (double p : {1e-12, 0.01, 0.2, 0.49, 0.51, 0.8, 0.999999}) {
    const double x = LaplaceQuantile(p, nu);
    const double cdf =
        x < 0 ? 0.5 * std::exp(x / nu) : 1.0 - 0.5 * std::exp(-x / nu);
    EXPECT_NEAR(cdf, p, 1e-14);
    EXPECT_NEAR(LaplaceQuantile(1.0 - p, nu), -x, 1e-9);
  }
}

TEST(Noise, StreamsAreReproducibleAndDistinct) {
  NoiseSource a(5, 1);
  NoiseSource b(5, 1);
  NoiseSource c(5, 2);
  NoiseSource d(6, 1);
  const Vector va = SampleLaplace(1.0, 16, a);
  EXPECT_EQ(va, SampleLaplace(1.0, 16, b));
  EXPECT_NE(va, SampleLaplace(1.0, 16, c));
  EXPECT_NE(va, SampleLaplace(1.0, 16, d));
  EXPECT_THROW(SampleLaplace(0.0, 3, a), ValidationError);
  EXPECT_THROW(SampleLaplace(-1.0, 3, a), ValidationError);
}

TEST(RunPlain, SingleSubsystemReachesCentralizedOptimum) {
  const DmpcProblem prob = SingleSubsystemProblem(0.3);
  const WeightMatrix w(Matrix::Zero(1, 1));
  const States x = SingleState();

  // The price-free optimum breaks the coupled bound, so the dual matters.
  const LocalSolvers local(prob, x);
  ASSERT_GT(local.G(0, local.Solve(0, Vector::Zero(prob.dual_dim())))
                .maxCoeff(),
            1e-3);

  DualRunOptions opts;
  opts.iterations = 20000;
  const IterationTrace trace = RunPlain(prob, x, w, Schedule{}, opts);
  const CentralizedSolution best = SolveCentralized(prob, x);
  EXPECT_LE((trace.final_inputs[0] - best.inputs[0]).cwiseAbs().maxCoeff(),
            1e-3);
  EXPECT_LE(trace.final_g[0].maxCoeff(), 1e-3);
}

TEST(RunPlain, ZeroStepMixesPricesToTheirAverage) {
  const auto& cfg = ReferenceConfig();
  const WeightMatrix w(cfg.weights);
  Schedule frozen;
  frozen.c4 = 0.0;
  DualRunOptions opts;
  opts.iterations = 300;
  Vector mean = Vector::Zero(cfg.problem.dual_dim());
  for (int i = 0; i < 4; ++i) {
    opts.lambda0.push_back(
        Vector::LinSpaced(cfg.problem.dual_dim(), 0.0, 1.0 + i));
    mean += opts.lambda0.back() / 4.0;
  }
  const IterationTrace trace = RunPlain(cfg.problem, cfg.x0, w, frozen, opts);
  for (const Vector& l : trace.final_lambda) {
    EXPECT_LE((l - mean).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RunPrivate, ZeroNoiseSingleSubsystemEqualsPlain) {
  const DmpcProblem prob = SingleSubsystemProblem(0.3);
  const WeightMatrix w(Matrix::Zero(1, 1));
  DualRunOptions opts;
  opts.iterations = 500;
  opts.zero_noise = true;
  opts.trace = TraceLevel::kFull;
  const IterationTrace plain =
      RunPlain(prob, SingleState(), w, Schedule{}, opts);
  const IterationTrace priv =
      RunPrivate(prob, SingleState(), w, Schedule{}, opts);
  ASSERT_EQ(plain.records.size(), priv.records.size());
  for (size_t k = 0; k < plain.records.size(); ++k) {
    EXPECT_EQ(plain.records[k].lambda[0], priv.records[k].lambda[0]) << k;
    EXPECT_EQ(plain.records[k].inputs[0], priv.records[k].inputs[0]) << k;
  }
  EXPECT_EQ(plain.final_lambda[0], priv.final_lambda[0]);
}

TEST(RunPrivate, OnlyPerturbedPricesReachTheNetwork) {
  const auto& cfg = ReferenceConfig();
  const WeightMatrix w(cfg.weights);
  ObservationLog log;
  DualRunOptions opts;
  opts.iterations = 50;
  opts.trace = TraceLevel::kFull;
  opts.log = &log;
  opts.seed = 3;
  const IterationTrace trace =
      RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  ASSERT_EQ(log.rounds.size(), 50u);
  for (size_t k = 0; k < log.rounds.size(); ++k) {
    const ObservationRound& round = log.rounds[k];
    EXPECT_EQ(round.channel, "lambda_hat");
    EXPECT_DOUBLE_EQ(round.PublicValue("gamma"),
                     cfg.schedule.Gamma(static_cast<int>(k)));
    for (const ObservationRecord& rec : round.records) {
      const size_t i = static_cast<size_t>(rec.sender);
      EXPECT_EQ(rec.payload, trace.records[k].messages[i]);
      // Every coordinate carries noise, none equals the private price.
      EXPECT_GT((rec.payload - trace.records[k].lambda[i]).cwiseAbs().minCoeff(),
                0.0);
    }
  }
}

TEST(RunPrivate, DeterministicPerSeedAndNonnegative) {
  const auto& cfg = ReferenceConfig();
  const WeightMatrix w(cfg.weights);
  DualRunOptions opts;
  opts.iterations = 200;
  opts.seed = 11;
  opts.trace = TraceLevel::kFull;
  const IterationTrace a = RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  const IterationTrace b = RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  opts.seed = 12;
  const IterationTrace c = RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  for (int i = 0; i < 4; ++i) {
    const size_t s = static_cast<size_t>(i);
    EXPECT_EQ(a.final_lambda[s], b.final_lambda[s]);
    EXPECT_EQ(a.final_inputs[s], b.final_inputs[s]);
  }
  EXPECT_NE(a.records.back().messages[0], c.records.back().messages[0]);
  for (const IterationRecord& r : a.records) {
    for (const Vector& l : r.lambda) ASSERT_GE(l.minCoeff(), 0.0);
    EXPECT_LE((r.lambda_bar - MeanOf(r.lambda)).norm(), 0.0);
  }
  std::ostringstream csv;
  a.WriteCsv(csv);
  EXPECT_EQ(csv.str().rfind("dualgrad.k,dualgrad.subsystem,dualgrad.lambda[0]",
                            0),
            0u);
}

TEST(RunPrivate, NoiseFreeDisagreementShrinks) {
  const auto& cfg = ReferenceConfig();
  const WeightMatrix w(cfg.weights);
  DualRunOptions opts;
  opts.iterations = 2000;
  opts.zero_noise = true;
  opts.trace = TraceLevel::kFull;
  const IterationTrace trace =
      RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  double early = 0.0;
  double late = 0.0;
  for (int k = 0; k < 500; ++k) {
    early = std::max(early, DualDisagreement(trace.records[static_cast<size_t>(k)].lambda));
  }
  for (int k = 1500; k < 2000; ++k) {
    late = std::max(late, DualDisagreement(trace.records[static_cast<size_t>(k)].lambda));
  }
  EXPECT_LT(late, early);
}

TEST(RunPrivate, NoiseFreeDualityGapSurrogateSmall) {
  const auto& cfg = ReferenceConfig();
  const WeightMatrix w(cfg.weights);
  DualRunOptions opts;
  opts.iterations = 5000;
  opts.zero_noise = true;
  const IterationTrace trace =
      RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  const double best = SolveCentralized(cfg.problem, cfg.x0).cost;
  Vector lambda_bar = Vector::Zero(cfg.problem.dual_dim());
  for (const Vector& l : trace.final_lambda) lambda_bar += l / 4.0;
  double surrogate = 0.0;
  for (size_t i = 0; i < 4; ++i) {
    surrogate += EvalCost(cfg.problem.condensed[i], cfg.x0[i],
                          trace.final_inputs[i]) +
                 lambda_bar.dot(trace.final_g[i]);
  }
  EXPECT_LE(std::abs(surrogate - best) / best, 1e-2);
}

TEST(DualRun, ZeroIterationsSolveAtInitialPrices) {
  const DmpcProblem prob = SingleSubsystemProblem(0.3);
  const WeightMatrix w(Matrix::Zero(1, 1));
  DualRunOptions opts;
  opts.iterations = 0;
  opts.lambda0 = {Vector::Constant(prob.dual_dim(), 0.3)};
  const IterationTrace trace =
      RunPrivate(prob, SingleState(), w, Schedule{}, opts);
  const LocalSolvers local(prob, SingleState());
  EXPECT_EQ(trace.final_inputs[0], local.Solve(0, opts.lambda0[0]));
  EXPECT_EQ(trace.final_lambda[0], opts.lambda0[0]);
}

TEST(DualRun, RejectsBadInitialPrices) {
  const DmpcProblem prob = SingleSubsystemProblem(0.3);
  const WeightMatrix w(Matrix::Zero(1, 1));
  DualRunOptions opts;
  opts.lambda0 = {Vector::Constant(prob.dual_dim(), -0.1)};
  EXPECT_THROW(RunPlain(prob, SingleState(), w, Schedule{}, opts),
               ValidationError);
  opts.lambda0 = {Vector::Zero(prob.dual_dim() + 1)};
  EXPECT_THROW(RunPrivate(prob, SingleState(), w, Schedule{}, opts),
               ValidationError);
  EXPECT_THROW(RunPlain(prob, {}, w, Schedule{}, DualRunOptions{}),
               ValidationError);
}

}  // namespace
}  // namespace dpdmpc
