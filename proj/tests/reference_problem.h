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

#ifndef DPDMPC_TESTS_REFERENCE_PROBLEM_H_
#define DPDMPC_TESTS_REFERENCE_PROBLEM_H_

#include <string>

#include "dpdmpc/experiment.h"

namespace dpdmpc::testing {

inline std::string ReferenceConfigPath() {
  return std::string(DPDMPC_SOURCE_DIR) + "/configs/paper_sec5.json";
}

// The bundled four-subsystem benchmark, parsed and validated once.
inline const ExperimentConfig& ReferenceConfig() {
  static const ExperimentConfig config = ParseConfig(ReferenceConfigPath());
  return config;
}

// Single subsystem with a scalar coupling row on its first input,
// Σu ≤ bound. Used where M = 1 makes the dual problem exactly centralized.
inline DmpcProblem SingleSubsystemProblem(double bound, int horizon = 4,
                                          double eps = 0.0) {
  Matrix a(2, 2);
  a << 1, 1, 0, 1;
  Matrix b(2, 1);
  b << 0.5, 1;
  Subsystem s = MakeSubsystem(
      a, b, Matrix::Identity(2, 2), Matrix::Identity(1, 1) * 0.1,
      Polytope::FromBox(Vector::Constant(2, -2.0), Vector::Constant(2, 2.0)),
      Polytope::FromBox(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)),
      Polytope::FromBox(Vector::Constant(2, -0.5), Vector::Constant(2, 0.5)));
  GlobalCoupling coupling;
  coupling.p = 1;
  coupling.psi_x.push_back(Matrix::Zero(1, 2));
  coupling.psi_u.push_back(Matrix::Constant(1, 1, 1.0 / bound));
  return BuildProblem({s}, coupling, horizon, eps);
}

}  // namespace dpdmpc::testing

#endif  // DPDMPC_TESTS_REFERENCE_PROBLEM_H_
