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
#include <iomanip>
#include <sstream>

#include "dpdmpc/errors.h"
#include "dpdmpc/network.h"

namespace dpdmpc {
namespace {

constexpr double kStructureTol = 1e-12;

}  // namespace

std::string WeightMatrixReport::Describe() const {
  std::ostringstream out;
  if (!square) {
    out << "matrix is not square";
    return out.str();
  }
  auto line = [&](const char* name, const WeightCheck& c) {
    if (!c.pass) out << name << " (measured " << c.measured << "); ";
  };
  line("not symmetric", symmetric);
  line("negative off-diagonal weight", nonneg_offdiag);
  line("diagonal is not minus the neighbor sum", diagonal);
  line("row sums nonzero", row_sums);
  line("column sums nonzero", col_sums);
  line("‖I + L − 11ᵀ/M‖ ≥ 1", contraction);
  return out.str();
}

WeightMatrixReport ValidateWeightMatrix(const Matrix& l) {
  WeightMatrixReport r;
  r.square = l.rows() == l.cols() && l.rows() > 0 && l.allFinite();
  if (!r.square) return r;
  const Eigen::Index m = l.rows();

  r.symmetric.measured = (l - l.transpose()).cwiseAbs().maxCoeff();
  r.symmetric.pass = r.symmetric.measured <= kStructureTol;

  double min_off = INFINITY;
  double diag_err = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double off_sum = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      min_off = std::min(min_off, l(i, j));
      off_sum += l(i, j);
    }
    diag_err = std::max(diag_err, std::abs(l(i, i) + off_sum));
  }
  r.nonneg_offdiag.measured = m > 1 ? min_off : 0.0;
  r.nonneg_offdiag.pass = r.nonneg_offdiag.measured >= 0.0;
  r.diagonal.measured = diag_err;
  r.diagonal.pass = diag_err <= kStructureTol;

  r.row_sums.measured = (l * Vector::Ones(m)).cwiseAbs().maxCoeff();
  r.row_sums.pass = r.row_sums.measured <= kStructureTol;
  r.col_sums.measured =
      (Vector::Ones(m).transpose() * l).cwiseAbs().maxCoeff();
  r.col_sums.pass = r.col_sums.measured <= kStructureTol;

  const Matrix mixing = Matrix::Identity(m, m) + l -
                        Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
  r.contraction.measured = SpectralNorm(mixing);
  r.contraction.pass = r.contraction.measured < 1.0;
  return r;
}

WeightMatrix::WeightMatrix(const Matrix& l) : l_(l) {
  const WeightMatrixReport report = ValidateWeightMatrix(l);
  if (!report.ok()) {
    throw ValidationError("weight matrix: " + report.Describe());
  }
  const int m = static_cast<int>(l.rows());
  neighbors_.resize(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (j != i && l(i, j) > 0.0) neighbors_[static_cast<size_t>(i)].push_back(j);
    }
  }
}

double WeightMatrix::min_abs_diagonal() const {
  return l_.diagonal().cwiseAbs().minCoeff();
}

int WeightMatrix::max_degree() const {
  size_t best = 0;
  for (const auto& n : neighbors_) best = std::max(best, n.size());
  return static_cast<int>(best);
}

double ObservationRound::PublicValue(const std::string& key) const {
  for (const auto& [name, value] : public_values) {
    if (name == key) return value;
  }
  throw std::out_of_range("observation round has no public value '" + key +
                          "'");
}

void ObservationLog::WriteCsv(std::ostream& out) const {
  size_t width = 0;
  for (const auto& round : rounds) {
    for (const auto& rec : round.records) {
      width = std::max(width, static_cast<size_t>(rec.payload.size()));
    }
  }
  out << "network.round,network.channel,network.sender,network.receivers";
  for (size_t k = 0; k < width; ++k) out << ",network.message[" << k << "]";
  out << "\n";
  out << std::setprecision(17);
  for (const auto& round : rounds) {
    for (const auto& rec : round.records) {
      out << round.round << "," << round.channel << "," << rec.sender << ",";
      for (size_t r = 0; r < rec.receivers.size(); ++r) {
        if (r) out << ";";
        out << rec.receivers[r];
      }
      for (Eigen::Index k = 0; k < rec.payload.size(); ++k) {
        out << "," << rec.payload(k);
      }
      out << "\n";
    }
  }
}

SyncNetwork::SyncNetwork(std::vector<std::vector<int>> neighbors,
                         ObservationLog* log)
    : neighbors_(std::move(neighbors)), log_(log) {
  const int m = static_cast<int>(neighbors_.size());
  receivers_.resize(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j : neighbors_[static_cast<size_t>(i)]) {
      if (j < 0 || j >= m || j == i) {
        throw ValidationError("network: invalid neighbor index");
      }
      // i listens to j, so j's message is received by i.
      receivers_[static_cast<size_t>(j)].push_back(i);
    }
  }
  for (auto& n : neighbors_) std::sort(n.begin(), n.end());
  for (auto& r : receivers_) std::sort(r.begin(), r.end());
}

void SyncNetwork::Deliver(
    const std::vector<Vector>& outgoing, std::vector<Inbox>* inboxes,
    const std::string& channel,
    std::vector<std::pair<std::string, double>> public_values) {
  const size_t m = neighbors_.size();
  if (outgoing.size() != m) {
    throw NetworkError("round " + std::to_string(round_) + ": expected " +
                       std::to_string(m) + " messages, got " +
                       std::to_string(outgoing.size()));
  }
  for (size_t i = 0; i < m; ++i) {
    if (outgoing[i].size() == 0) {
      throw NetworkError("round " + std::to_string(round_) +
                         ": missing message from subsystem " +
                         std::to_string(i));
    }
  }
  inboxes->resize(m);
  for (size_t i = 0; i < m; ++i) {
    Inbox& inbox = (*inboxes)[i];
    inbox.clear();
    for (int j : neighbors_[i]) {
      inbox.push_back(InboxEntry{j, &outgoing[static_cast<size_t>(j)]});
    }
  }
  if (log_ != nullptr) {
    ObservationRound round;
    round.round = round_;
    round.channel = channel;
    round.public_values = std::move(public_values);
    for (size_t i = 0; i < m; ++i) {
      round.records.push_back(
          ObservationRecord{static_cast<int>(i), receivers_[i], outgoing[i]});
    }
    log_->rounds.push_back(std::move(round));
  }
  ++round_;
}

std::vector<std::vector<std::vector<std::pair<int, Vector>>>> ReplayLog(
    const ObservationLog& log, const std::vector<std::vector<int>>& neighbors) {
  std::vector<std::vector<std::vector<std::pair<int, Vector>>>> out;
  for (const auto& round : log.rounds) {
    std::vector<std::vector<std::pair<int, Vector>>> inboxes(neighbors.size());
    for (const auto& rec : round.records) {
      for (int r : rec.receivers) {
        inboxes[static_cast<size_t>(r)].emplace_back(rec.sender, rec.payload);
      }
    }
    out.push_back(std::move(inboxes));
  }
  return out;
}

}  // namespace dpdmpc
