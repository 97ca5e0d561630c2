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

#ifndef DPDMPC_CONSENSUS_H_
#define DPDMPC_CONSENSUS_H_

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "dpdmpc/dualgrad.h"
#include "dpdmpc/network.h"
#include "dpdmpc/numerics.h"

namespace dpdmpc {

// Coupling weights of the decomposed consensus. `a` is symmetric with
// support on the topology's edges; a_alpha_beta holds one internal weight
// per subsystem.
struct ConsensusParams {
  double iota = 0.0;
  Matrix a;
  Vector a_alpha_beta;
};

// a_ij = 1 on edges, a_αβ = 1, ι = 0.9/(1 + max degree).
ConsensusParams DefaultConsensusParams(const WeightMatrix& weights);

// Throws ValidationError unless `a` is symmetric, nonnegative, supported on
// the edges of `neighbors`, a_αβ > 0 and ι·max_i(Σ_j a_ij + a_αβ,i) < 1.
void ValidateConsensusParams(const ConsensusParams& params,
                             const std::vector<std::vector<int>>& neighbors);

struct DecomposedState {
  std::vector<Vector> alpha;  // shared with neighbors
  std::vector<Vector> beta;   // never leaves the subsystem
};

// α⁰ uniform in [z0 − s, z0 + s] per coordinate and β⁰ = 2z0 − α⁰. A
// negative spread selects s = 10‖z0‖∞ + 1.
std::pair<Vector, Vector> Decompose(const Vector& z0, NoiseSource& rng,
                                    double spread = -1.0);

// One synchronous round. Only α is delivered through `network`.
DecomposedState ConsensusRound(const DecomposedState& state,
                               const ConsensusParams& params,
                               SyncNetwork& network);

struct ConsensusOptions {
  double tol = 1e-8;
  int max_rounds = 500;
  double spread = -1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  ObservationLog* log = nullptr;
  bool keep_history = false;
};

struct ConsensusResult {
  std::vector<Vector> estimates;  // final α_i
  int rounds = 0;
  std::vector<std::vector<Vector>> history;  // α per round, round 0 first
  std::vector<double> conserved_sum_drift;   // max |Σ(α+β) − Σ(α⁰+β⁰)|

  // Columns: round, subsystem, α entries.
  void WriteCsv(std::ostream& out) const;
};

// Iterates until every coordinate of every substate lies within `tol` of
// every other, which places each α_i within tol of the average of z0.
// Throws ConvergenceError after max_rounds.
ConsensusResult RunConsensus(const std::vector<Vector>& z0,
                             const ConsensusParams& params,
                             const std::vector<std::vector<int>>& neighbors,
                             const ConsensusOptions& options);

// Default decision margin 10·tol·M.
double DefaultFeasibilityMargin(double tol, int num_subsystems);

// True iff M·avg_g ≤ εM − margin in every entry. Plans within `margin` of
// the tightened bound are rejected.
bool CheckGlobalFeasibility(const Vector& avg_g, double eps,
                            int num_subsystems, double margin);

}  // namespace dpdmpc

#endif  // DPDMPC_CONSENSUS_H_
