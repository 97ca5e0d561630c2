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

#include "dpdmpc/consensus.h"
#include "dpdmpc/errors.h"

namespace dpdmpc {
namespace {

double Spread(const DecomposedState& s) {
  const Eigen::Index d = s.alpha.front().size();
  double worst = 0.0;
  for (Eigen::Index r = 0; r < d; ++r) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (size_t i = 0; i < s.alpha.size(); ++i) {
      lo = std::min({lo, s.alpha[i](r), s.beta[i](r)});
      hi = std::max({hi, s.alpha[i](r), s.beta[i](r)});
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

Vector Total(const DecomposedState& s) {
  Vector sum = Vector::Zero(s.alpha.front().size());
  for (size_t i = 0; i < s.alpha.size(); ++i) sum += s.alpha[i] + s.beta[i];
  return sum;
}

}  // namespace

ConsensusParams DefaultConsensusParams(const WeightMatrix& weights) {
  const int M = weights.size();
  ConsensusParams p;
  p.a = Matrix::Zero(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j : weights.neighbors(i)) p.a(i, j) = 1.0;
  }
  p.a_alpha_beta = Vector::Ones(M);
  p.iota = 0.9 / (1.0 + weights.max_degree());
  return p;
}

void ValidateConsensusParams(const ConsensusParams& params,
                             const std::vector<std::vector<int>>& neighbors) {
  const Eigen::Index M = static_cast<Eigen::Index>(neighbors.size());
  if (params.a.rows() != M || params.a.cols() != M ||
      params.a_alpha_beta.size() != M) {
    throw ValidationError("consensus: weight dimensions differ from M");
  }
  if (!params.a.allFinite() || (params.a - params.a.transpose()).cwiseAbs()
                                       .maxCoeff() > 0.0) {
    throw ValidationError("consensus: a_ij must be symmetric");
  }
  for (Eigen::Index i = 0; i < M; ++i) {
    const auto& n = neighbors[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < M; ++j) {
      const double w = params.a(i, j);
      if (w < 0.0) throw ValidationError("consensus: a_ij must be >= 0");
      const bool edge = std::find(n.begin(), n.end(), j) != n.end();
      if (w > 0.0 && !edge) {
        throw ValidationError("consensus: a_ij > 0 off the topology edges");
      }
    }
    if (!(params.a_alpha_beta(i) > 0.0)) {
      throw ValidationError("consensus: a_alpha_beta must be > 0");
    }
  }
  const double load =
      (params.a.rowwise().sum() + params.a_alpha_beta).maxCoeff();
  if (!(params.iota > 0.0) || !(params.iota * load < 1.0)) {
    throw ValidationError("consensus: iota * max(sum a_ij + a_alpha_beta) "
                          "must lie in (0, 1)");
  }
}

std::pair<Vector, Vector> Decompose(const Vector& z0, NoiseSource& rng,
                                    double spread) {
  const double s = spread >= 0.0
                       ? spread
                       : 10.0 * (z0.size() ? z0.cwiseAbs().maxCoeff() : 0.0) +
                             1.0;
  Vector alpha(z0.size());
  for (Eigen::Index r = 0; r < z0.size(); ++r) {
    alpha(r) = z0(r) + s * (2.0 * rng.Uniform() - 1.0);
  }
  Vector beta = 2.0 * z0 - alpha;
  return {std::move(alpha), std::move(beta)};
}

DecomposedState ConsensusRound(const DecomposedState& state,
                               const ConsensusParams& params,
                               SyncNetwork& network) {
  const size_t M = state.alpha.size();
  std::vector<Inbox> inboxes;
  network.Deliver(state.alpha, &inboxes, "z_alpha");
  DecomposedState next;
  next.alpha.resize(M);
  next.beta.resize(M);
  for (size_t i = 0; i < M; ++i) {
    const Vector& a = state.alpha[i];
    const Vector& b = state.beta[i];
    const double ab = params.a_alpha_beta(static_cast<Eigen::Index>(i));
    Vector pull = Vector::Zero(a.size());
    for (const InboxEntry& e : inboxes[i]) {
      pull += params.a(static_cast<Eigen::Index>(i), e.sender) *
              (*e.message - a);
    }
    next.alpha[i] = a + params.iota * pull + params.iota * ab * (b - a);
    next.beta[i] = b + params.iota * ab * (a - b);
  }
  return next;
}

ConsensusResult RunConsensus(const std::vector<Vector>& z0,
                             const ConsensusParams& params,
                             const std::vector<std::vector<int>>& neighbors,
                             const ConsensusOptions& options) {
  const size_t M = z0.size();
  if (M == 0 || neighbors.size() != M) {
    throw ValidationError("consensus: one value per subsystem required");
  }
  for (const Vector& z : z0) {
    if (z.size() != z0.front().size() || !z.allFinite()) {
      throw ValidationError("consensus: values must be finite and equal-sized");
    }
  }
  ValidateConsensusParams(params, neighbors);

  DecomposedState state;
  for (size_t i = 0; i < M; ++i) {
    NoiseSource rng(options.seed,
                    options.stream * 0x9E3779B97F4A7C15ULL + i + 1);
    auto [a, b] = Decompose(z0[i], rng, options.spread);
    state.alpha.push_back(std::move(a));
    state.beta.push_back(std::move(b));
  }
  const Vector total0 = Total(state);

  SyncNetwork network(neighbors, options.log);
  ConsensusResult result;
  if (options.keep_history) result.history.push_back(state.alpha);
  while (Spread(state) > options.tol) {
    if (result.rounds >= options.max_rounds) {
      throw ConvergenceError("consensus did not reach tolerance in " +
                                 std::to_string(options.max_rounds) +
                                 " rounds",
                             Spread(state));
    }
    state = ConsensusRound(state, params, network);
    ++result.rounds;
    result.conserved_sum_drift.push_back(
        (Total(state) - total0).cwiseAbs().maxCoeff());
    if (options.keep_history) result.history.push_back(state.alpha);
  }
  result.estimates = std::move(state.alpha);
  return result;
}

void ConsensusResult::WriteCsv(std::ostream& out) const {
  out << "consensus.round,consensus.subsystem";
  const Eigen::Index d =
      history.empty() ? 0 : history.front().front().size();
  for (Eigen::Index r = 0; r < d; ++r) out << ",consensus.z_alpha[" << r << "]";
  out << "\n" << std::setprecision(17);
  for (size_t k = 0; k < history.size(); ++k) {
    for (size_t i = 0; i < history[k].size(); ++i) {
      out << k << "," << i;
      for (Eigen::Index r = 0; r < d; ++r) out << "," << history[k][i](r);
      out << "\n";
    }
  }
}

double DefaultFeasibilityMargin(double tol, int num_subsystems) {
  return 10.0 * tol * num_subsystems;
}

bool CheckGlobalFeasibility(const Vector& avg_g, double eps,
                            int num_subsystems, double margin) {
  const double m = static_cast<double>(num_subsystems);
  return ((m * avg_g).array() <= eps * m - margin).all();
}

}  // namespace dpdmpc
