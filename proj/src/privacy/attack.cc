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

#include "dpdmpc/errors.h"
#include "dpdmpc/privacy.h"

namespace dpdmpc {

int AttackEntry::unclipped() const {
  return static_cast<int>(std::count(clipped.begin(), clipped.end(), false));
}

AttackResult EavesdropReconstruct(const ObservationLog& log,
                                  const WeightMatrix& weights) {
  const int M = weights.size();
  AttackResult result;
  auto messages_of = [&](const ObservationRound& round) {
    if (static_cast<int>(round.records.size()) != M) {
      throw ValidationError("attack: round " + std::to_string(round.round) +
                            " does not hold one message per subsystem");
    }
    std::vector<const Vector*> out(static_cast<size_t>(M));
    for (const ObservationRecord& rec : round.records) {
      out[static_cast<size_t>(rec.sender)] = &rec.payload;
    }
    return out;
  };

  for (size_t k = 0; k + 1 < log.rounds.size(); ++k) {
    const auto now = messages_of(log.rounds[k]);
    const auto next = messages_of(log.rounds[k + 1]);
    const double gamma = log.rounds[k].PublicValue("gamma");
    for (int i = 0; i < M; ++i) {
      const Vector& own = *now[static_cast<size_t>(i)];
      AttackEntry e;
      e.k = static_cast<int>(k);
      e.subsystem = i;
      const Vector& after = *next[static_cast<size_t>(i)];
      e.clipped.resize(static_cast<size_t>(after.size()));
      for (Eigen::Index r = 0; r < after.size(); ++r) {
        e.clipped[static_cast<size_t>(r)] = after(r) == 0.0;
      }
      if (gamma == 0.0) {
        e.skipped = true;
        result.entries.push_back(std::move(e));
        continue;
      }
      Vector mixed = own;
      for (int j : weights.neighbors(i)) {
        mixed += weights(i, j) * (*now[static_cast<size_t>(j)] - own);
      }
      e.estimate = (after - mixed) / gamma;
      result.entries.push_back(std::move(e));
    }
  }
  return result;
}

void ScoreAttack(const IterationTrace& trace, AttackResult* result) {
  for (AttackEntry& e : result->entries) {
    if (e.k >= static_cast<int>(trace.records.size())) {
      throw ValidationError("attack scoring: trace shorter than the log");
    }
    e.truth = trace.records[static_cast<size_t>(e.k)]
                  .g[static_cast<size_t>(e.subsystem)];
    e.error = 0.0;
    if (e.skipped) continue;
    for (Eigen::Index r = 0; r < e.truth.size(); ++r) {
      if (e.clipped[static_cast<size_t>(r)]) continue;
      e.error = std::max(e.error, std::abs(e.estimate(r) - e.truth(r)));
    }
  }
}

void AttackResult::WriteCsv(std::ostream& out) const {
  out << "privacy.attack.k,privacy.attack.subsystem,privacy.attack.error,"
         "privacy.attack.clipped\n";
  out << std::setprecision(17);
  for (const AttackEntry& e : entries) {
    out << e.k << "," << e.subsystem << "," << e.error << ","
        << (static_cast<int>(e.clipped.size()) - e.unclipped()) << "\n";
  }
}

}  // namespace dpdmpc
