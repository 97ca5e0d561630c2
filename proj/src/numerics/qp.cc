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
#include <limits>
#include <vector>

#include "dpdmpc/errors.h"
#include "dpdmpc/numerics.h"

namespace dpdmpc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

DenseQpSolver::DenseQpSolver(const Matrix& hessian, const Matrix& constraints)
    : hessian_(0.5 * (hessian + hessian.transpose())), g_(constraints) {
  if (hessian.rows() != hessian.cols()) {
    throw ValidationError("QP: Hessian must be square");
  }
  if (g_.cols() != hessian_.cols() && g_.rows() > 0) {
    throw ValidationError("QP: constraint matrix has wrong column count");
  }
  RequireFinite(hessian_, "QP Hessian");
  RequireFinite(g_, "QP constraint matrix");
  llt_.compute(hessian_);
  if (llt_.info() != Eigen::Success) {
    throw ValidationError("QP: Hessian is not positive definite");
  }
  if (g_.rows() > 0) {
    scaled_normals_ = llt_.matrixL().solve(g_.transpose());
  } else {
    scaled_normals_.resize(hessian_.rows(), 0);
  }
}

QpSolution DenseQpSolver::Solve(const Vector& f, const Vector& h) const {
  const Eigen::Index n = hessian_.rows();
  const Eigen::Index m = g_.rows();
  if (f.size() != n || h.size() != m) {
    throw ValidationError("QP: linear term or bound has wrong size");
  }

  Vector x = llt_.solve(-f);
  std::vector<Eigen::Index> active;
  std::vector<double> active_mult;
  std::vector<char> is_active(static_cast<size_t>(m), 0);

  const int cap = 50 * static_cast<int>(m + n) + 100;
  int iterations = 0;

  auto drop = [&](size_t slot) {
    is_active[static_cast<size_t>(active[slot])] = 0;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(slot));
    active_mult.erase(active_mult.begin() + static_cast<std::ptrdiff_t>(slot));
  };

  const double x_scale_floor = 1.0;
  while (true) {
    // Most violated inactive constraint.
    Eigen::Index p = -1;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (is_active[static_cast<size_t>(i)]) continue;
      const double viol = g_.row(i).dot(x) - h(i);
      const double tol =
          1e-12 * (x_scale_floor + std::abs(h(i)) + g_.row(i).norm() * x.norm());
      if (viol > tol && viol > worst) {
        worst = viol;
        p = i;
      }
    }
    if (p < 0) break;

    double mult_p = 0.0;
    while (true) {
      if (++iterations > cap) {
        throw ConvergenceError("QP: active-set iteration cap reached",
                               g_.row(p).dot(x) - h(p));
      }
      const Eigen::Index q = static_cast<Eigen::Index>(active.size());
      const Vector c = scaled_normals_.col(p);

      // Split c into the span of the active scaled normals and its
      // complement: r gives the change of the active multipliers, z the
      // primal direction.
      Vector r(q);
      Vector z = Vector::Zero(n);
      if (q == 0) {
        z = -llt_.matrixU().solve(c);
      } else {
        Matrix basis(n, q);
        for (Eigen::Index j = 0; j < q; ++j) {
          basis.col(j) = scaled_normals_.col(active[static_cast<size_t>(j)]);
        }
        Eigen::HouseholderQR<Matrix> qr(basis);
        const Matrix qfull = qr.householderQ();
        const Vector d = qfull.transpose() * c;
        r = qr.matrixQR()
                .topLeftCorner(q, q)
                .triangularView<Eigen::Upper>()
                .solve(d.head(q));
        if (q < n) {
          const Vector tail = d.tail(n - q);
          if (tail.norm() > 1e-12 * c.norm()) {
            z = -llt_.matrixU().solve(qfull.rightCols(n - q) * tail);
          }
        }
      }

      // Dual step limit: an active multiplier reaching zero.
      double t_dual = kInf;
      size_t leave = 0;
      for (size_t j = 0; j < active.size(); ++j) {
        if (r(static_cast<Eigen::Index>(j)) > 1e-14) {
          const double ratio =
              active_mult[j] / r(static_cast<Eigen::Index>(j));
          if (ratio < t_dual) {
            t_dual = ratio;
            leave = j;
          }
        }
      }
      // Primal step: constraint p becomes tight.
      double t_primal = kInf;
      const double slope = g_.row(p).dot(z);
      if (z.squaredNorm() > 0.0 && slope < 0.0) {
        t_primal = (g_.row(p).dot(x) - h(p)) / -slope;
      }

      if (t_dual == kInf && t_primal == kInf) {
        throw InfeasibleProblemError("QP: constraint set is empty");
      }
      if (t_primal == kInf) {
        for (size_t j = 0; j < active.size(); ++j) {
          active_mult[j] = std::max(
              0.0, active_mult[j] - t_dual * r(static_cast<Eigen::Index>(j)));
        }
        mult_p += t_dual;
        drop(leave);
        continue;
      }
      const double t = std::min(t_dual, t_primal);
      x += t * z;
      for (size_t j = 0; j < active.size(); ++j) {
        active_mult[j] = std::max(
            0.0, active_mult[j] - t * r(static_cast<Eigen::Index>(j)));
      }
      mult_p += t;
      if (t_primal <= t_dual) {
        active.push_back(p);
        active_mult.push_back(mult_p);
        is_active[static_cast<size_t>(p)] = 1;
        break;
      }
      drop(leave);
    }
  }

  QpSolution sol;
  sol.u = x;
  sol.multipliers = Vector::Zero(m);
  for (size_t j = 0; j < active.size(); ++j) {
    sol.multipliers(active[j]) = active_mult[j];
  }
  sol.iterations = iterations;
  sol.primal_residual =
      m > 0 ? std::max(0.0, (g_ * x - h).maxCoeff()) : 0.0;
  const Vector grad = hessian_ * x + f +
                      (m > 0 ? Vector(g_.transpose() * sol.multipliers)
                             : Vector::Zero(n));
  sol.stationarity_residual = grad.cwiseAbs().maxCoeff();
  return sol;
}

QpSolution SolveQp(const QpProblem& problem, double tol) {
  RequireFinite(problem.f, "QP linear term");
  RequireFinite(problem.h, "QP bound");
  DenseQpSolver solver(problem.H, problem.G);
  QpSolution sol = solver.Solve(problem.f, problem.h);
  if (sol.primal_residual > tol || sol.stationarity_residual > tol) {
    throw SolverError(
        "QP: solution not certified (primal residual " +
        std::to_string(sol.primal_residual) + ", stationarity residual " +
        std::to_string(sol.stationarity_residual) + ")");
  }
  return sol;
}

}  // namespace dpdmpc
