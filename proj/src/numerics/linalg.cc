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

#include "dpdmpc/errors.h"
#include "dpdmpc/numerics.h"

namespace dpdmpc {

void RequireFinite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) {
    throw ValidationError(what + ": entries must be finite");
  }
}

double SpectralNorm(const Matrix& m) {
  RequireFinite(m, "SpectralNorm input");
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.transpose() * m;
  const double scale = gram.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;

  // Start from the largest column of mᵀm pushed once more through mᵀm: it
  // lies in the range and is dominated by the leading eigenvector except in
  // contrived cases.
  Eigen::Index best_col = 0;
  gram.colwise().norm().maxCoeff(&best_col);
  Vector v = gram * gram.col(best_col);
  if (v.norm() == 0.0) v = gram.col(best_col);
  v.normalize();

  constexpr int kMaxIterations = 200000;
  double theta = v.dot(gram * v);
  for (int it = 0; it < kMaxIterations; ++it) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(gram * v);
    const double change = std::abs(next - theta);
    theta = next;
    if (change <= 1e-15 * theta) {
      // Rayleigh quotient of a symmetric matrix: eigenvalue error is second
      // order in the vector error.
      return std::sqrt(std::max(theta, 0.0));
    }
  }
  const double residual = (gram * v - theta * v).norm();
  throw ConvergenceError("SpectralNorm: power iteration did not converge",
                         residual);
}

Vector ProjectNonneg(const Vector& v) { return v.cwiseMax(0.0); }

bool IsPositiveDefinite(const Matrix& m) {
  if (m.rows() != m.cols() || m.size() == 0) return false;
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::LLT<Matrix> llt(sym);
  return llt.info() == Eigen::Success;
}

bool IsControllable(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  Matrix ctrb(n, b.cols() * n);
  Matrix block = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    ctrb.middleCols(i * b.cols(), b.cols()) = block;
    block = a * block;
  }
  Eigen::FullPivLU<Matrix> lu(ctrb);
  lu.setThreshold(1e-10);
  return lu.rank() == n;
}

}  // namespace dpdmpc
