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

#include <cmath>
#include <limits>
#include <vector>

#include "dpdmpc/errors.h"
#include "dpdmpc/numerics.h"

namespace dpdmpc {
namespace {

constexpr double kPivotTol = 1e-11;

// Dense tableau for min costᵀy, Ay = b, y ≥ 0. The last column holds the
// right-hand side; the last row holds reduced costs and −objective.
class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b)
      : rows_(a.rows()), vars_(a.cols()) {
    t_ = Matrix::Zero(rows_ + 1, vars_ + rows_ + 1);
    basis_.resize(static_cast<size_t>(rows_));
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double sign = b(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(vars_) = sign * a.row(i);
      t_(i, vars_ + i) = 1.0;
      t_(i, rhs()) = sign * b(i);
      basis_[static_cast<size_t>(i)] = vars_ + i;
    }
  }

  Eigen::Index rhs() const { return vars_ + rows_; }

  void SetObjective(const Vector& cost) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(cost.size()) = cost.transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index bv = basis_[static_cast<size_t>(i)];
      const double cb = t_(rows_, bv);
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(i);
    }
  }

  // Runs Bland's-rule simplex over columns [0, allowed). Returns false if the
  // objective is unbounded below.
  bool Optimize(Eigen::Index allowed) {
    const int cap = 100000;
    for (int it = 0; it < cap; ++it) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t_(rows_, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double a = t_(i, enter);
        if (a > kPivotTol) {
          const double ratio = t_(i, rhs()) / a;
          if (ratio < best - 1e-14 ||
              (std::abs(ratio - best) <= 1e-14 && leave >= 0 &&
               basis_[static_cast<size_t>(i)] <
                   basis_[static_cast<size_t>(leave)])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      Pivot(leave, enter);
    }
    throw ConvergenceError("LP: simplex iteration cap reached", 0.0);
  }

  void Pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i != row && t_(i, col) != 0.0) {
        t_.row(i) -= t_(i, col) * t_.row(row);
      }
    }
    basis_[static_cast<size_t>(row)] = col;
  }

  // Pivots zero-level artificial variables out of the basis where possible.
  void EvictArtificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<size_t>(i)] < vars_) continue;
      for (Eigen::Index j = 0; j < vars_; ++j) {
        if (std::abs(t_(i, j)) > kPivotTol) {
          Pivot(i, j);
          break;
        }
      }
    }
  }

  double objective() const { return -t_(rows_, rhs()); }

 private:
  Eigen::Index rows_;
  Eigen::Index vars_;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpSolution MaximizeLinear(const Vector& c, const Matrix& g, const Vector& h) {
  if (g.cols() != c.size() || g.rows() != h.size()) {
    throw ValidationError("LP: dimension mismatch");
  }
  RequireFinite(c, "LP objective");
  RequireFinite(g, "LP constraint matrix");
  RequireFinite(h, "LP bound");
  const Eigen::Index n = c.size();
  const Eigen::Index m = g.rows();

  Tableau tab(g.transpose(), c);
  Vector phase1 = Vector::Zero(m + n);
  phase1.tail(n).setOnes();
  tab.SetObjective(phase1);
  tab.Optimize(m + n);
  LpSolution sol;
  if (tab.objective() > 1e-9 * (1.0 + c.cwiseAbs().sum())) {
    sol.status = LpStatus::kUnbounded;
    sol.value = std::numeric_limits<double>::infinity();
    return sol;
  }
  tab.EvictArtificials();
  Vector phase2 = Vector::Zero(m + n);
  phase2.head(m) = h;
  tab.SetObjective(phase2);
  if (!tab.Optimize(m)) {
    sol.status = LpStatus::kInfeasible;
    sol.value = -std::numeric_limits<double>::infinity();
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.value = tab.objective();
  return sol;
}

}  // namespace dpdmpc
