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

// Acceptance run: one PASS/FAIL line per criterion on the bundled
// benchmark. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dpdmpc/consensus.h"
#include "dpdmpc/experiment.h"
#include "dpdmpc/privacy.h"
#include "oracles.h"

namespace dpdmpc {
namespace {

constexpr double kRuntimeLimitSeconds = 300.0;
constexpr int kOracleIterations = 5000;
constexpr double kOracleObjectiveRel = 1e-2;
constexpr double kOracleInputInf = 1e-2;
constexpr int kDisagreementIterations = 2000;
constexpr int kAccountantHorizon = 10000;
constexpr double kAccountantTol = 1e-12;
constexpr int kEpsilonWindow = 1000;
constexpr int kAttackIterations = 1000;
constexpr double kPlainAttackTol = 1e-9;
constexpr double kPrivateAttackRatio = 10.0;
constexpr double kPrivateAttackFloor = 1e-6;
constexpr double kDareTol = 1e-10;
constexpr double kQpTol = 1e-6;
constexpr double kConsensusMeanTol = 1e-8;
constexpr double kConsensusDriftTol = 1e-12;

int failures = 0;

void Report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string Fmt(const char* format, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

double Median(std::vector<double> v) {
  if (v.empty()) return NAN;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

void SafetyAndFeasibility(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult res = RunExperiment(cfg, "");
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  Report(1,
         res.private_violations == 0 && res.baseline_violations >= 1 &&
             seconds < kRuntimeLimitSeconds,
         Fmt("private violations %.0f, baseline violations %.0f, %.1f s",
             res.private_violations, res.baseline_violations, seconds));

  bool ok = !res.private_logs.empty();
  int fallbacks = 0;
  int latest_entry = -1;
  for (const RunSummary& run : res.private_runs) {
    ok = ok && run.recursive_feasibility_ok && run.terminal_entry >= 0 &&
         run.terminal_entry < cfg.steps;
    fallbacks += run.fallbacks;
    latest_entry = std::max(latest_entry, run.terminal_entry);
  }
  Report(8, ok,
         Fmt("%.0f runs, %.0f fallback steps, latest terminal entry t=%.0f",
             static_cast<double>(res.private_runs.size()), fallbacks,
             latest_entry));
}

void OracleEquivalence(const ExperimentConfig& cfg, const WeightMatrix& w) {
  DualRunOptions opts;
  opts.iterations = kOracleIterations;
  opts.zero_noise = true;
  const IterationTrace trace =
      RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  const CentralizedSolution best = SolveCentralized(cfg.problem, cfg.x0);
  double cost = 0.0;
  double input_gap = 0.0;
  for (size_t i = 0; i < cfg.x0.size(); ++i) {
    cost += EvalCost(cfg.problem.condensed[i], cfg.x0[i],
                     trace.final_inputs[i]);
    input_gap = std::max(
        input_gap,
        (trace.final_inputs[i] - best.inputs[i]).cwiseAbs().maxCoeff());
  }
  const double rel = std::abs(cost - best.cost) / std::abs(best.cost);

  // Same budget without the weakening factor, for context only.
  const IterationTrace plain =
      RunPlain(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  double plain_gap = 0.0;
  for (size_t i = 0; i < cfg.x0.size(); ++i) {
    plain_gap = std::max(
        plain_gap,
        (plain.final_inputs[i] - best.inputs[i]).cwiseAbs().maxCoeff());
  }
  Report(2, rel <= kOracleObjectiveRel && input_gap <= kOracleInputInf,
         Fmt("relative objective gap %.2e, input inf-norm gap %.2e "
             "(plain dual ascent: %.2e)",
             rel, input_gap, plain_gap));
}

void DisagreementWindows(const ExperimentConfig& cfg, const WeightMatrix& w) {
  const int windows[4] = {0, 500, 1000, kDisagreementIterations};
  int decreasing = 0;
  double worst_ratio = 0.0;
  for (int run = 0; run < cfg.runs; ++run) {
    DualRunOptions opts;
    opts.iterations = kDisagreementIterations;
    opts.trace = TraceLevel::kFull;
    opts.seed = cfg.seed + static_cast<std::uint64_t>(run);
    const IterationTrace trace =
        RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
    double medians[3];
    for (int win = 0; win < 3; ++win) {
      std::vector<double> spread;
      for (int k = windows[win]; k < windows[win + 1]; ++k) {
        const IterationRecord& rec = trace.records[static_cast<size_t>(k)];
        double worst = 0.0;
        for (const Vector& l : rec.lambda) {
          worst = std::max(worst, (l - rec.lambda_bar).norm());
        }
        spread.push_back(worst);
      }
      medians[win] = Median(spread);
    }
    if (medians[1] < medians[0] && medians[2] < medians[1]) ++decreasing;
    worst_ratio = std::max({worst_ratio, medians[1] / medians[0],
                            medians[2] / medians[1]});
  }
  Report(3, decreasing == cfg.runs,
         Fmt("%.0f of %.0f seeds decreasing, worst window ratio %.3f",
             decreasing, cfg.runs, worst_ratio));
}

void Accountant(const ExperimentConfig& cfg, const WeightMatrix& w) {
  const double l_bar = w.min_abs_diagonal();
  const double c = cfg.adjacency_constant.value_or(
      DefaultAdjacencyConstant(cfg.problem, cfg.schedule));
  const SensitivityResult sens =
      SensitivitySequence(kAccountantHorizon, c, cfg.schedule, l_bar);
  double worst = 0.0;
  for (int k = 1; k <= kAccountantHorizon; ++k) {
    const double delta = sens.delta[static_cast<size_t>(k)];
    worst = std::max(worst, std::abs(c * Varsigma(k, cfg.schedule, l_bar) -
                                     delta) /
                                std::max(1.0, delta));
  }
  bool shrinking = true;
  double previous = INFINITY;
  double last = 0.0;
  for (int t = kEpsilonWindow; t <= kAccountantHorizon; t += kEpsilonWindow) {
    const double value = EpsilonBound(t, c, cfg.schedule, l_bar).value;
    const double window = value - last;
    shrinking = shrinking && window < previous;
    previous = window;
    last = value;
  }
  Schedule constant = cfg.schedule;
  constant.d2 = 0.0;
  const bool divergent =
      EpsilonBoundInfinite(c, constant, l_bar, kAccountantHorizon).diverges;
  Report(4, worst <= kAccountantTol && shrinking && divergent,
         Fmt("max relative gap %.2e, window sums shrinking %.0f, "
             "constant noise divergent %.0f",
             worst, shrinking, divergent));
}

void Attack(const ExperimentConfig& cfg, const WeightMatrix& w) {
  DualRunOptions opts;
  opts.iterations = kAttackIterations;
  opts.trace = TraceLevel::kFull;
  opts.seed = cfg.seed;

  ObservationLog plain_log;
  opts.log = &plain_log;
  const IterationTrace plain =
      RunPlain(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  AttackResult plain_attack = EavesdropReconstruct(plain_log, w);
  ScoreAttack(plain, &plain_attack);

  ObservationLog private_log;
  opts.log = &private_log;
  const IterationTrace noisy =
      RunPrivate(cfg.problem, cfg.x0, w, cfg.schedule, opts);
  AttackResult private_attack = EavesdropReconstruct(private_log, w);
  ScoreAttack(noisy, &private_attack);

  std::vector<double> plain_errors;
  for (const AttackEntry& e : plain_attack.entries) {
    if (!e.skipped && e.unclipped() > 0) plain_errors.push_back(e.error);
  }
  std::vector<double> private_errors;
  for (const AttackEntry& e : private_attack.entries) {
    if (!e.skipped && e.unclipped() > 0) private_errors.push_back(e.error);
  }
  const double plain_max =
      plain_errors.empty()
          ? NAN
          : *std::max_element(plain_errors.begin(), plain_errors.end());
  const double plain_med = Median(plain_errors);
  const double private_med = Median(private_errors);
  Report(5,
         plain_max <= kPlainAttackTol &&
             private_med >= kPrivateAttackRatio * plain_med &&
             private_med > kPrivateAttackFloor,
         Fmt("plain max error %.2e, plain median %.2e, private median %.2e",
             plain_max, plain_med, private_med));
}

void NumericsOracles(const ExperimentConfig& cfg) {
  double dare_worst = 0.0;
  for (const Subsystem& s : cfg.problem.subsystems) {
    const RiccatiSolution sol = SolveDare(s.A, s.B, s.Q, s.R);
    dare_worst = std::max(
        dare_worst, testing::StandardDareResidual(s.A, s.B, s.Q, s.R, sol.p));
  }
  std::mt19937_64 gen(5);
  int solved = 0;
  while (solved < 100) {
    const Eigen::Index n = 1 + solved % 4;
    const Eigen::Index m = 1 + solved % 2;
    const Matrix a = testing::RandomMatrix(n, n, gen, 1.2);
    const Matrix b = testing::RandomMatrix(n, m, gen, 1.0);
    if (!IsControllable(a, b)) continue;
    const Matrix l = testing::RandomMatrix(n, n, gen, 1.0);
    const Matrix q = l * l.transpose() + 0.5 * Matrix::Identity(n, n);
    const Matrix r = 0.1 * Matrix::Identity(m, m);
    const RiccatiSolution sol = SolveDare(a, b, q, r);
    dare_worst = std::max(dare_worst,
                          testing::StandardDareResidual(a, b, q, r, sol.p));
    ++solved;
  }

  std::mt19937_64 qgen(17);
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  double qp_worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = 1 + trial % 6;
    const Eigen::Index rows = 1 + (trial / 6) % 8;
    const Matrix l = testing::RandomMatrix(n, n, qgen);
    QpProblem qp;
    qp.H = l * l.transpose() + 0.1 * Matrix::Identity(n, n);
    qp.f = testing::RandomMatrix(n, 1, qgen, 3.0);
    qp.G = testing::RandomMatrix(rows, n, qgen);
    const Vector u0 = testing::RandomMatrix(n, 1, qgen);
    qp.h = qp.G * u0;
    for (Eigen::Index r = 0; r < rows; ++r) qp.h(r) += slack(qgen);
    const Vector oracle = testing::EnumerateQp(qp);
    const Vector u = SolveQp(qp).u;
    qp_worst = oracle.size() == n
                   ? std::max(qp_worst, (u - oracle).cwiseAbs().maxCoeff())
                   : INFINITY;
  }
  Report(6, dare_worst <= kDareTol && qp_worst <= kQpTol,
         Fmt("worst DARE residual %.2e, worst QP gap %.2e", dare_worst,
             qp_worst));
}

void ConsensusAverage(const WeightMatrix& w) {
  const ConsensusParams params = DefaultConsensusParams(w);
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double mean_gap = 0.0;
  double drift = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vector> z0;
    Vector mean = Vector::Zero(10);
    for (int i = 0; i < w.size(); ++i) {
      Vector v(10);
      for (Eigen::Index r = 0; r < 10; ++r) v(r) = u(gen);
      z0.push_back(v);
      mean += v / w.size();
    }
    ConsensusOptions opts;
    opts.seed = static_cast<std::uint64_t>(trial);
    const ConsensusResult r = RunConsensus(z0, params, w.adjacency(), opts);
    for (const Vector& est : r.estimates) {
      mean_gap = std::max(mean_gap, (est - mean).cwiseAbs().maxCoeff());
    }
    for (double d : r.conserved_sum_drift) drift = std::max(drift, d);
  }
  Report(7, mean_gap <= kConsensusMeanTol && drift <= kConsensusDriftTol,
         Fmt("worst mean gap %.2e, worst sum drift %.2e", mean_gap, drift));
}

}  // namespace
}  // namespace dpdmpc

int main() {
  using namespace dpdmpc;
  try {
    const ExperimentConfig cfg =
        ParseConfig(DPDMPC_SOURCE_DIR "/configs/paper_sec5.json");
    const WeightMatrix w(cfg.weights);
    NumericsOracles(cfg);
    ConsensusAverage(w);
    Accountant(cfg, w);
    OracleEquivalence(cfg, w);
    Attack(cfg, w);
    DisagreementWindows(cfg, w);
    SafetyAndFeasibility(cfg);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
