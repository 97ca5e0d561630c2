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

#include "dpdmpc/errors.h"
#include "dpdmpc/model.h"

namespace dpdmpc {

Polytope Polytope::FromBox(const Vector& lower, const Vector& upper) {
  if (lower.size() != upper.size()) {
    throw ValidationError("box bounds have different dimensions");
  }
  if ((lower.array() > upper.array()).any()) {
    throw ValidationError("box lower bound exceeds upper bound");
  }
  const Eigen::Index n = lower.size();
  Polytope p;
  p.G.resize(2 * n, n);
  p.G << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  p.h.resize(2 * n);
  p.h << upper, -lower;
  p.box = Box{lower, upper};
  return p;
}

Polytope Polytope::FromInequalities(const Matrix& g, const Vector& h) {
  if (g.rows() != h.size()) {
    throw ValidationError("polytope G and h have different row counts");
  }
  Polytope p;
  p.G = g;
  p.h = h;
  // Tag as a box when every row bounds exactly one coordinate and each
  // coordinate is bounded on both sides.
  const Eigen::Index n = g.cols();
  Vector lower = Vector::Constant(n, -INFINITY);
  Vector upper = Vector::Constant(n, INFINITY);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    Eigen::Index col = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (g(i, j) != 0.0) {
        if (col >= 0) return p;
        col = j;
      }
    }
    if (col < 0) return p;
    const double bound = h(i) / g(i, col);
    if (g(i, col) > 0) {
      upper(col) = std::min(upper(col), bound);
    } else {
      lower(col) = std::max(lower(col), bound);
    }
  }
  if (lower.allFinite() && upper.allFinite() &&
      (lower.array() <= upper.array()).all()) {
    p.box = Box{lower, upper};
  }
  return p;
}

bool Polytope::Contains(const Vector& x, double tol) const {
  return Margin(x) >= -tol;
}

double Polytope::Margin(const Vector& x) const {
  if (x.size() != G.cols()) {
    throw ValidationError("polytope membership: dimension mismatch");
  }
  if (G.rows() == 0) return INFINITY;
  return (h - G * x).minCoeff();
}

std::vector<Vector> Polytope::Vertices() const {
  if (!box) {
    throw ValidationError(
        "vertex enumeration is only supported for box polytopes");
  }
  const Eigen::Index n = box->lower.size();
  std::vector<Vector> out;
  out.reserve(size_t{1} << n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Vector v(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      v(j) = (mask >> j) & 1u ? box->upper(j) : box->lower(j);
    }
    out.push_back(std::move(v));
  }
  return out;
}

Polytope Polytope::Scaled(double factor) const {
  Polytope p = *this;
  p.h *= factor;
  if (p.box) {
    p.box->lower *= factor;
    p.box->upper *= factor;
  }
  return p;
}

void ValidatePolytope(const Polytope& p, const std::string& name,
                      bool strict_interior) {
  if (p.G.rows() != p.h.size()) {
    throw ValidationError(name + ": G and h have different row counts");
  }
  RequireFinite(p.G, name + ".G");
  RequireFinite(p.h, name + ".h");
  if (strict_interior) {
    if (p.h.size() > 0 && p.h.minCoeff() <= 0.0) {
      throw ValidationError(name + ": origin must be an interior point");
    }
  } else if (p.h.size() > 0 && p.h.minCoeff() < 0.0) {
    throw ValidationError(name + ": must contain the origin");
  }
  const Eigen::Index n = p.G.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (double sign : {1.0, -1.0}) {
      Vector dir = Vector::Zero(n);
      dir(j) = sign;
      const LpSolution lp = MaximizeLinear(dir, p.G, p.h);
      if (lp.status != LpStatus::kOptimal) {
        throw ValidationError(name + ": polytope is unbounded along axis " +
                              std::to_string(j));
      }
    }
  }
}

}  // namespace dpdmpc
