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
#include <string>

#include "dpdmpc/dualgrad.h"

namespace dpdmpc {

double Schedule::Chi(int k) const {
  return c1 / (1.0 + c2 * std::pow(static_cast<double>(k), c3));
}

double Schedule::Gamma(int k) const {
  return c4 / (1.0 + c5 * static_cast<double>(k));
}

double Schedule::Nu(int k) const {
  if (d2 == 0.0) return d1;
  return d1 + d2 * std::pow(static_cast<double>(k), d3);
}

ScheduleReport ValidateSchedule(const Schedule& s) {
  ScheduleReport r;
  bool ranges = true;
  auto require = [&](bool ok, const std::string& why) {
    if (!ok) {
      ranges = false;
      r.reasons.push_back(why);
    }
  };
  require(s.c1 > 0.0, "chi.c1 must be > 0");
  require(s.c2 > 0.0, "chi.c2 must be > 0");
  require(s.c4 > 0.0, "gamma.c4 must be > 0");
  require(s.c5 > 0.0, "gamma.c5 must be > 0");
  require(s.d1 > 0.0, "nu.d1 must be > 0");
  require(s.d2 >= 0.0, "nu.d2 must be >= 0");

  const bool c3_ok = s.c3 > 0.5 && s.c3 < 1.0;
  if (!c3_ok) {
    r.reasons.push_back("chi.c3 must lie in (0.5, 1): sum chi diverges and "
                        "sum chi^2 converges only there");
  }
  r.converges = ranges && c3_ok;

  if (s.d2 > 0.0) {
    if (!(s.d3 > 0.0 && s.d3 <= 1.0 - s.c3 + 1e-12)) {
      r.reasons.push_back("nu.d3 must lie in (0, 1 - c3] when nu.d2 > 0");
    }
    r.noise_condition = 2.0 * s.c3 - 2.0 * s.d3 > 1.0;
  } else {
    r.noise_condition = 2.0 * s.c3 > 1.0;
  }
  if (!r.noise_condition) {
    r.reasons.push_back("noise condition 2*c3 - 2*d3 > 1 fails");
  }

  r.finite_budget = ranges && s.d2 > 0.0 && s.d3 > 0.0;
  if (!r.finite_budget) {
    r.reasons.push_back(
        "privacy budget diverges: gamma/nu must decay faster than 1/k, which "
        "needs nu.d2 > 0 and nu.d3 > 0");
  }
  return r;
}

}  // namespace dpdmpc
