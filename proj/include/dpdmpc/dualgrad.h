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

#ifndef DPDMPC_DUALGRAD_H_
#define DPDMPC_DUALGRAD_H_

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "dpdmpc/model.h"
#include "dpdmpc/network.h"
#include "dpdmpc/numerics.h"

namespace dpdmpc {

// χᵏ = c1/(1 + c2·k^c3), γᵏ = c4/(1 + c5·k), νᵏ = d1 + d2·k^d3.
struct Schedule {
  double c1 = 2.0;
  double c2 = 0.01;
  double c3 = 0.9;
  double c4 = 5.0;
  double c5 = 0.1;
  double d1 = 0.1;
  double d2 = 0.001;
  double d3 = 0.1;

  double Chi(int k) const;
  double Gamma(int k) const;
  double Nu(int k) const;
};

struct ScheduleReport {
  bool converges = false;
  bool noise_condition = false;  // Σ (νᵏ χᵏ)² < ∞ for the power families
  bool finite_budget = false;    // Σ γᵏ/νᵏ < ∞
  std::vector<std::string> reasons;
};

// Reduces the summability conditions of the parametric families to exponent
// inequalities:
//   converges      ⟺ ranges valid and 0.5 < c3 < 1 (γ² / χ ~ k^(c3−2))
//   noise_condition ⟺ 2c3 − 2d3 > 1 (2c3 > 1 when d2 = 0)
//   finite_budget  ⟺ d2 > 0 and d3 > 0 (γ/ν ~ k^(−1−d3))
// Range violations are reported in `reasons`, never thrown.
ScheduleReport ValidateSchedule(const Schedule& s);

// Deterministic uniform and Laplace draws for one (seed, stream) pair.
// Distinct streams are seeded through std::seed_seq and do not overlap in
// practice.
class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, std::uint64_t stream);

  // Uniform on the open interval (0, 1).
  double Uniform();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Inverse CDF of Lap(ν) at probability p ∈ (0, 1).
double LaplaceQuantile(double p, double nu);

// `dim` i.i.d. Lap(ν) draws. Throws ValidationError unless ν > 0.
Vector SampleLaplace(double nu, int dim, NoiseSource& rng);

enum class TraceLevel {
  kFinal,  // only the final iterate
  kFull,   // every iteration
};

struct IterationRecord {
  std::vector<Vector> lambda;    // λ_iᵏ before the update
  std::vector<Vector> messages;  // what crossed the network (λ or λ̂)
  Sequences inputs;              // ũ_iᵏ⁺¹
  std::vector<Vector> g;         // g_i(ũ_iᵏ⁺¹)
  Vector lambda_bar;             // mean of λ_iᵏ
};

struct IterationTrace {
  std::vector<IterationRecord> records;  // empty at TraceLevel::kFinal
  std::vector<Vector> final_lambda;      // λ after the last update
  Sequences final_inputs;                // ũ from the last primal step
  std::vector<Vector> final_g;
  int iterations = 0;

  // Columns: k, subsystem, λ entries, message entries, g entries.
  void WriteCsv(std::ostream& out) const;
};

// Arithmetic mean of λ_iᵏ stored at record k.
Vector DualAverage(const IterationTrace& trace, int k);
Vector MeanOf(const std::vector<Vector>& values);

struct DualRunOptions {
  int iterations = 1500;
  std::vector<Vector> lambda0;  // empty means λ⁰ = 0
  TraceLevel trace = TraceLevel::kFinal;
  ObservationLog* log = nullptr;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  // Test mode: λ̂ = λ exactly. Production runs require νᵏ > 0.
  bool zero_noise = false;
  // Plain runs only: add Lap(νᵏ) to the shared λ messages.
  bool noisy_messages = false;
};

// Per-subsystem local solvers for one set of states. The QP data of every
// dual iteration differ only in the linear term, so the factorizations are
// built once.
class LocalSolvers {
 public:
  LocalSolvers(const DmpcProblem& problem, const States& states);

  // argmin J_i(x_i, ũ) + λᵀ g_i(ũ) over Ũ_i(x_i). λ is used as given, so a
  // noisy mixed price with negative entries is accepted.
  Vector Solve(int i, const Vector& lambda) const;
  Vector G(int i, const Vector& u) const;

 private:
  const DmpcProblem* problem_;
  States states_;
  std::vector<DenseQpSolver> solvers_;
  std::vector<Vector> linear_base_;
  std::vector<Vector> bounds_;
};

// Distributed dual gradient with post-mixing prices:
//   λ̃_i = λ_i + Σ_j L_ij(λ_j − λ_i),  ũ_i = argmin J_i + λ̃_iᵀg_i,
//   λ_i ← Π[λ̃_i + γᵏ g_i(ũ_i)].
// Uses γ from `schedule`; with `noisy_messages` the shared λ_j carry
// Lap(νᵏ) noise. SolverError messages name the failing iteration.
IterationTrace RunPlain(const DmpcProblem& problem, const States& states,
                        const WeightMatrix& weights, const Schedule& schedule,
                        const DualRunOptions& options);

// Private variant with pre-mixing prices and weakened noisy mixing:
//   ũ_i = argmin J_i + λ_iᵀg_i,  λ̂_j = λ_j + ζ_j,  ζ_j ~ Lap(νᵏ),
//   λ_i ← Π[λ_i + χᵏ Σ_j L_ij(λ̂_j − λ_i) + γᵏ g_i(ũ_i)].
// Only λ̂ is placed on the network.
IterationTrace RunPrivate(const DmpcProblem& problem, const States& states,
                          const WeightMatrix& weights,
                          const Schedule& schedule,
                          const DualRunOptions& options);

// max_i ‖λ_i − λ̄‖₂.
double DualDisagreement(const std::vector<Vector>& lambda);

}  // namespace dpdmpc

#endif  // DPDMPC_DUALGRAD_H_
