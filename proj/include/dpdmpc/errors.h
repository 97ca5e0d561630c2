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

#ifndef DPDMPC_ERRORS_H_
#define DPDMPC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpdmpc {

// Input or configuration rejected by a validator. Maps to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to produce a certified answer. Maps to exit
// status 3.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative method hit its iteration cap. `residual()` is the last measured
// residual.
class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : SolverError(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// The constraint set of a QP or LP is empty.
class InfeasibleProblemError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Messages missing or malformed in a synchronous round.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed-loop safety invariant (local or global constraint membership,
// initial feasibility) does not hold. Maps to exit status 4.
class SafetyViolation : public std::runtime_error {
 public:
  SafetyViolation(const std::string& what, int step, double margin)
      : std::runtime_error(what), step_(step), margin_(margin) {}
  int step() const { return step_; }
  double margin() const { return margin_; }

 private:
  int step_;
  double margin_;
};

// The solver output at t = 0 does not pass the global feasibility check, so
// the recursive-feasibility argument has nothing to start from.
class InitializationError : public SafetyViolation {
 public:
  using SafetyViolation::SafetyViolation;
};

}  // namespace dpdmpc

#endif  // DPDMPC_ERRORS_H_
