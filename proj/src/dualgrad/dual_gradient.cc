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
#include <iomanip>
#include <string>
#include <utility>

#include "dpdmpc/dualgrad.h"
#include "dpdmpc/errors.h"

namespace dpdmpc {
namespace {

constexpr double kQpTol = 1e-8;

std::uint64_t SubStream(std::uint64_t stream, int i) {
  return stream * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(i) + 1;
}

void CheckInputs(const DmpcProblem& problem, const States& states,
                 const WeightMatrix& weights, const DualRunOptions& options) {
  const int M = problem.num_subsystems();
  if (static_cast<int>(states.size()) != M) {
    throw ValidationError("dual run: one state per subsystem required");
  }
  if (weights.size() != M) {
    throw ValidationError("dual run: weight matrix size differs from M");
  }
  if (options.iterations < 0) {
    throw ValidationError("dual run: iteration count must be >= 0");
  }
  if (!options.lambda0.empty()) {
    if (static_cast<int>(options.lambda0.size()) != M) {
      throw ValidationError("dual run: lambda0 needs one vector per subsystem");
    }
    for (const Vector& l : options.lambda0) {
      if (l.size() != problem.dual_dim() || l.minCoeff() < 0.0) {
        throw ValidationError(
            "dual run: lambda0 entries must be nonnegative vectors of size Np");
      }
    }
  }
}

std::vector<Vector> InitialLambda(const DmpcProblem& problem,
                                  const DualRunOptions& options) {
  if (!options.lambda0.empty()) return options.lambda0;
  return std::vector<Vector>(static_cast<size_t>(problem.num_subsystems()),
                             Vector::Zero(problem.dual_dim()));
}

[[noreturn]] void RethrowAt(int k, int i) {
  const std::string where = "iteration " + std::to_string(k) +
                            ", subsystem " + std::to_string(i) + ": ";
  try {
    throw;
  } catch (const InfeasibleProblemError& e) {
    throw InfeasibleProblemError(where + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(where + e.what(), e.residual());
  } catch (const SolverError& e) {
    throw SolverError(where + e.what());
  }
}

std::vector<NoiseSource> MakeStreams(int M, const DualRunOptions& options) {
  std::vector<NoiseSource> out;
  out.reserve(static_cast<size_t>(M));
  for (int i = 0; i < M; ++i) {
    out.emplace_back(options.seed, SubStream(options.stream, i));
  }
  return out;
}

}  // namespace

LocalSolvers::LocalSolvers(const DmpcProblem& problem, const States& states)
    : problem_(&problem), states_(states) {
  const int M = problem.num_subsystems();
  if (static_cast<int>(states.size()) != M) {
    throw ValidationError("local solvers: one state per subsystem required");
  }
  solvers_.reserve(static_cast<size_t>(M));
  for (int i = 0; i < M; ++i) {
    const CondensedLocal& c = problem.condensed[static_cast<size_t>(i)];
    const Vector& x = states[static_cast<size_t>(i)];
    if (x.size() != c.n) {
      throw ValidationError("local solvers: state " + std::to_string(i) +
                            " has wrong dimension");
    }
    solvers_.emplace_back(c.cost_H, c.ineq_G);
    linear_base_.push_back(c.cost_f_map * x);
    bounds_.push_back(c.IneqBound(x));
  }
}

Vector LocalSolvers::Solve(int i, const Vector& lambda) const {
  const size_t s = static_cast<size_t>(i);
  const CondensedLocal& c = problem_->condensed[s];
  const Vector f = linear_base_[s] + c.coupling_E.transpose() * lambda;
  QpSolution sol = solvers_[s].Solve(f, bounds_[s]);
  const double scale = 1.0 + f.cwiseAbs().maxCoeff();
  if (sol.primal_residual > kQpTol ||
      sol.stationarity_residual > kQpTol * scale) {
    throw SolverError("local QP not certified (primal " +
                      std::to_string(sol.primal_residual) + ", stationarity " +
                      std::to_string(sol.stationarity_residual) + ")");
  }
  return std::move(sol.u);
}

Vector LocalSolvers::G(int i, const Vector& u) const {
  const size_t s = static_cast<size_t>(i);
  return EvalG(problem_->condensed[s], states_[s], u, problem_->b_eps,
               problem_->num_subsystems());
}

Vector MeanOf(const std::vector<Vector>& values) {
  if (values.empty()) throw ValidationError("mean of an empty set");
  Vector sum = Vector::Zero(values.front().size());
  for (const Vector& v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double DualDisagreement(const std::vector<Vector>& lambda) {
  const Vector bar = MeanOf(lambda);
  double worst = 0.0;
  for (const Vector& l : lambda) worst = std::max(worst, (l - bar).norm());
  return worst;
}

Vector DualAverage(const IterationTrace& trace, int k) {
  if (k < 0 || k >= static_cast<int>(trace.records.size())) {
    throw ValidationError("DualAverage: iteration " + std::to_string(k) +
                          " not in trace");
  }
  return MeanOf(trace.records[static_cast<size_t>(k)].lambda);
}

void IterationTrace::WriteCsv(std::ostream& out) const {
  if (records.empty()) {
    out << "dualgrad.k,dualgrad.subsystem\n";
    return;
  }
  const auto& first = records.front();
  const Eigen::Index d = first.lambda.front().size();
  out << "dualgrad.k,dualgrad.subsystem";
  for (Eigen::Index j = 0; j < d; ++j) out << ",dualgrad.lambda[" << j << "]";
  for (Eigen::Index j = 0; j < d; ++j) out << ",dualgrad.message[" << j << "]";
  for (Eigen::Index j = 0; j < d; ++j) out << ",dualgrad.g[" << j << "]";
  out << "\n" << std::setprecision(17);
  for (size_t k = 0; k < records.size(); ++k) {
    const IterationRecord& r = records[k];
    for (size_t i = 0; i < r.lambda.size(); ++i) {
      out << k << "," << i;
      for (Eigen::Index j = 0; j < d; ++j) out << "," << r.lambda[i](j);
      for (Eigen::Index j = 0; j < d; ++j) out << "," << r.messages[i](j);
      for (Eigen::Index j = 0; j < d; ++j) out << "," << r.g[i](j);
      out << "\n";
    }
  }
}

IterationTrace RunPlain(const DmpcProblem& problem, const States& states,
                        const WeightMatrix& weights, const Schedule& schedule,
                        const DualRunOptions& options) {
  CheckInputs(problem, states, weights, options);
  const int M = problem.num_subsystems();
  const int d = problem.dual_dim();
  const LocalSolvers local(problem, states);
  SyncNetwork network(weights.adjacency(), options.log);
  std::vector<NoiseSource> streams;
  if (options.noisy_messages && !options.zero_noise) {
    streams = MakeStreams(M, options);
  }

  IterationTrace trace;
  std::vector<Vector> lambda = InitialLambda(problem, options);
  std::vector<Vector> outgoing(static_cast<size_t>(M));
  std::vector<Inbox> inboxes;
  Sequences u(static_cast<size_t>(M));
  std::vector<Vector> g(static_cast<size_t>(M));
  std::vector<Vector> mixed(static_cast<size_t>(M));

  for (int k = 0; k < options.iterations; ++k) {
    const double gamma = schedule.Gamma(k);
    for (int i = 0; i < M; ++i) {
      outgoing[static_cast<size_t>(i)] = lambda[static_cast<size_t>(i)];
      if (!streams.empty()) {
        outgoing[static_cast<size_t>(i)] +=
            SampleLaplace(schedule.Nu(k), d, streams[static_cast<size_t>(i)]);
      }
    }
    network.Deliver(outgoing, &inboxes, "lambda", {{"gamma", gamma}});

    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      Vector& lt = mixed[s];
      lt = lambda[s];
      for (const InboxEntry& e : inboxes[s]) {
        lt += weights(i, e.sender) * (*e.message - lambda[s]);
      }
      try {
        u[s] = local.Solve(i, lt);
      } catch (const SolverError&) {
        RethrowAt(k, i);
      }
      g[s] = local.G(i, u[s]);
    }
    if (options.trace == TraceLevel::kFull) {
      IterationRecord rec;
      rec.lambda = lambda;
      rec.messages = outgoing;
      rec.inputs = u;
      rec.g = g;
      rec.lambda_bar = MeanOf(lambda);
      trace.records.push_back(std::move(rec));
    }
    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      lambda[s] = ProjectNonneg(mixed[s] + gamma * g[s]);
    }
  }
  trace.iterations = options.iterations;
  trace.final_lambda = std::move(lambda);
  if (options.iterations == 0) {
    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      u[s] = local.Solve(i, trace.final_lambda[s]);
      g[s] = local.G(i, u[s]);
    }
  }
  trace.final_inputs = std::move(u);
  trace.final_g = std::move(g);
  return trace;
}

IterationTrace RunPrivate(const DmpcProblem& problem, const States& states,
                          const WeightMatrix& weights,
                          const Schedule& schedule,
                          const DualRunOptions& options) {
  CheckInputs(problem, states, weights, options);
  const int M = problem.num_subsystems();
  const int d = problem.dual_dim();
  const LocalSolvers local(problem, states);
  SyncNetwork network(weights.adjacency(), options.log);
  std::vector<NoiseSource> streams;
  if (!options.zero_noise) streams = MakeStreams(M, options);

  IterationTrace trace;
  std::vector<Vector> lambda = InitialLambda(problem, options);
  std::vector<Vector> outgoing(static_cast<size_t>(M));
  std::vector<Inbox> inboxes;
  Sequences u(static_cast<size_t>(M));
  std::vector<Vector> g(static_cast<size_t>(M));

  for (int k = 0; k < options.iterations; ++k) {
    const double chi = schedule.Chi(k);
    const double gamma = schedule.Gamma(k);
    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      try {
        u[s] = local.Solve(i, lambda[s]);
      } catch (const SolverError&) {
        RethrowAt(k, i);
      }
      g[s] = local.G(i, u[s]);
      outgoing[s] = lambda[s];
      if (!streams.empty()) {
        outgoing[s] += SampleLaplace(schedule.Nu(k), d, streams[s]);
      }
    }
    network.Deliver(outgoing, &inboxes, "lambda_hat",
                    {{"chi", chi}, {"gamma", gamma}});
    if (options.trace == TraceLevel::kFull) {
      IterationRecord rec;
      rec.lambda = lambda;
      rec.messages = outgoing;
      rec.inputs = u;
      rec.g = g;
      rec.lambda_bar = MeanOf(lambda);
      trace.records.push_back(std::move(rec));
    }
    std::vector<Vector> next(static_cast<size_t>(M));
    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      Vector mix = Vector::Zero(d);
      for (const InboxEntry& e : inboxes[s]) {
        mix += weights(i, e.sender) * (*e.message - lambda[s]);
      }
      next[s] = ProjectNonneg(lambda[s] + chi * mix + gamma * g[s]);
    }
    lambda = std::move(next);
  }
  trace.iterations = options.iterations;
  trace.final_lambda = std::move(lambda);
  if (options.iterations == 0) {
    for (int i = 0; i < M; ++i) {
      const size_t s = static_cast<size_t>(i);
      u[s] = local.Solve(i, trace.final_lambda[s]);
      g[s] = local.G(i, u[s]);
    }
  }
  trace.final_inputs = std::move(u);
  trace.final_g = std::move(g);
  return trace;
}

}  // namespace dpdmpc
