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

#ifndef DPDMPC_NETWORK_H_
#define DPDMPC_NETWORK_H_

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dpdmpc/numerics.h"

namespace dpdmpc {

struct WeightCheck {
  bool pass = false;
  double measured = 0.0;
};

struct WeightMatrixReport {
  bool square = false;
  WeightCheck symmetric;         // max |L − Lᵀ|
  WeightCheck nonneg_offdiag;    // min off-diagonal entry
  WeightCheck diagonal;          // max |L_ii + Σ_{j≠i} L_ij|
  WeightCheck row_sums;          // ‖L1‖_∞
  WeightCheck col_sums;          // ‖1ᵀL‖_∞
  WeightCheck contraction;       // ‖I + L − 11ᵀ/M‖₂, must be < 1
  bool ok() const {
    return square && symmetric.pass && nonneg_offdiag.pass && diagonal.pass &&
           row_sums.pass && col_sums.pass && contraction.pass;
  }
  std::string Describe() const;
};

WeightMatrixReport ValidateWeightMatrix(const Matrix& l);

// Interaction weights with validated structure. Neighbors of i are the j ≠ i
// with L_ij > 0.
class WeightMatrix {
 public:
  // Throws ValidationError listing every failed check.
  explicit WeightMatrix(const Matrix& l);

  const Matrix& matrix() const { return l_; }
  int size() const { return static_cast<int>(l_.rows()); }
  const std::vector<int>& neighbors(int i) const {
    return neighbors_[static_cast<size_t>(i)];
  }
  const std::vector<std::vector<int>>& adjacency() const { return neighbors_; }
  double operator()(int i, int j) const { return l_(i, j); }
  // min_i |L_ii|
  double min_abs_diagonal() const;
  int max_degree() const;

 private:
  Matrix l_;
  std::vector<std::vector<int>> neighbors_;
};

struct ObservationRecord {
  int sender = 0;
  std::vector<int> receivers;
  Vector payload;
};

struct ObservationRound {
  int round = 0;
  std::string channel;
  // Public values in force for the round, e.g. {"gamma", γᵏ}.
  std::vector<std::pair<std::string, double>> public_values;
  std::vector<ObservationRecord> records;

  double PublicValue(const std::string& key) const;
};

// Everything an eavesdropper on every channel sees: the messages, in send
// order, plus the public schedule values. Append-only.
struct ObservationLog {
  std::vector<ObservationRound> rounds;

  // Columns: round, channel, sender, receivers (';'-joined), then one column
  // per payload entry.
  void WriteCsv(std::ostream& out) const;
};

struct InboxEntry {
  int sender = 0;
  const Vector* message = nullptr;
};
using Inbox = std::vector<InboxEntry>;

// Lockstep synchronous message passing. Deliver() is the barrier between
// the send and receive phases: every subsystem posts exactly one message,
// then every inbox is filled with the neighbors' messages in ascending
// sender order.
class SyncNetwork {
 public:
  explicit SyncNetwork(std::vector<std::vector<int>> neighbors,
                       ObservationLog* log = nullptr);

  // Inbox entries point into `outgoing`, which must outlive their use.
  // Throws NetworkError when a message is missing.
  void Deliver(const std::vector<Vector>& outgoing, std::vector<Inbox>* inboxes,
               const std::string& channel = "",
               std::vector<std::pair<std::string, double>> public_values = {});

  int size() const { return static_cast<int>(neighbors_.size()); }
  int rounds() const { return round_; }
  const std::vector<int>& neighbors(int i) const {
    return neighbors_[static_cast<size_t>(i)];
  }

 private:
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> receivers_;
  ObservationLog* log_;
  int round_ = 0;
};

// Rebuilds per-round inboxes from a log: result[round][i] lists
// (sender, message) pairs.
std::vector<std::vector<std::vector<std::pair<int, Vector>>>> ReplayLog(
    const ObservationLog& log, const std::vector<std::vector<int>>& neighbors);

}  // namespace dpdmpc

#endif  // DPDMPC_NETWORK_H_
