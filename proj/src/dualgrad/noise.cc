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

#include "dpdmpc/dualgrad.h"
#include "dpdmpc/errors.h"

namespace dpdmpc {
namespace {

std::mt19937_64 SeededEngine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

NoiseSource::NoiseSource(std::uint64_t seed, std::uint64_t stream)
    : engine_(SeededEngine(seed, stream)) {}

double NoiseSource::Uniform() {
  // 53 random bits mapped to the midpoints (j + ½)/2⁵³, never 0 or 1.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double LaplaceQuantile(double p, double nu) {
  const double centered = p - 0.5;
  if (centered == 0.0) return 0.0;
  const double sign = centered > 0.0 ? 1.0 : -1.0;
  return -nu * sign * std::log1p(-2.0 * std::abs(centered));
}

Vector SampleLaplace(double nu, int dim, NoiseSource& rng) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw ValidationError("Laplace scale must be positive and finite");
  }
  Vector out(dim);
  for (int j = 0; j < dim; ++j) out(j) = LaplaceQuantile(rng.Uniform(), nu);
  return out;
}

}  // namespace dpdmpc
