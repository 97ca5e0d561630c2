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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "dpdmpc/errors.h"
#include "dpdmpc/network.h"
#include "reference_problem.h"

namespace dpdmpc {
namespace {

Matrix StarWeights() {
  Matrix l = Matrix::Zero(4, 4);
  for (int leaf = 1; leaf < 4; ++leaf) {
    l(0, leaf) = l(leaf, 0) = 0.25;
    l(leaf, leaf) = -0.25;
  }
  l(0, 0) = -0.75;
  return l;
}

TEST(WeightMatrix, ReferenceTopologyPasses) {
  const Matrix& l = testing::ReferenceConfig().weights;
  const WeightMatrixReport report = ValidateWeightMatrix(l);
  EXPECT_TRUE(report.ok()) << report.Describe();
  EXPECT_LT(report.contraction.measured, 1.0);
  const WeightMatrix w(l);
  EXPECT_EQ(w.neighbors(0), (std::vector<int>{1, 3}));
  EXPECT_EQ(w.neighbors(2), (std::vector<int>{1, 3}));
  EXPECT_EQ(w.max_degree(), 2);
  EXPECT_DOUBLE_EQ(w.min_abs_diagonal(), 0.5);
}

TEST(WeightMatrix, ContractionMatchesEigenvalues) {
  const Matrix& l = testing::ReferenceConfig().weights;
  const Matrix t = Matrix::Identity(4, 4) + l - Matrix::Ones(4, 4) / 4.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(t);
  EXPECT_NEAR(ValidateWeightMatrix(l).contraction.measured,
              es.eigenvalues().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(WeightMatrix, StarAndSingleNode) {
  const WeightMatrix star(StarWeights());
  EXPECT_EQ(star.neighbors(0), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(star.neighbors(3), (std::vector<int>{0}));
  EXPECT_NEAR(ValidateWeightMatrix(StarWeights()).contraction.measured, 0.75,
              1e-10);

  const WeightMatrix single(Matrix::Zero(1, 1));
  EXPECT_TRUE(single.neighbors(0).empty());
  EXPECT_EQ(single.size(), 1);
}

TEST(WeightMatrix, RejectsEachBrokenProperty) {
  Matrix asym = StarWeights();
  asym(0, 1) = 0.3;
  asym(0, 0) = -0.8;
  EXPECT_FALSE(ValidateWeightMatrix(asym).symmetric.pass);
  EXPECT_THROW(WeightMatrix{asym}, ValidationError);

  Matrix neg = StarWeights();
  neg(1, 2) = neg(2, 1) = -0.1;
  neg(1, 1) = neg(2, 2) = -0.15;
  EXPECT_FALSE(ValidateWeightMatrix(neg).nonneg_offdiag.pass);

  Matrix rows = StarWeights();
  rows(1, 1) = -0.3;
  EXPECT_FALSE(ValidateWeightMatrix(rows).row_sums.pass);
  EXPECT_FALSE(ValidateWeightMatrix(rows).diagonal.pass);

  // Two disconnected pairs: consensus cannot mix across them.
  Matrix split = Matrix::Zero(4, 4);
  split(0, 1) = split(1, 0) = split(2, 3) = split(3, 2) = 0.5;
  split.diagonal().setConstant(-0.5);
  const WeightMatrixReport report = ValidateWeightMatrix(split);
  EXPECT_FALSE(report.contraction.pass);
  EXPECT_TRUE(report.symmetric.pass && report.row_sums.pass);

  EXPECT_FALSE(ValidateWeightMatrix(Matrix::Zero(2, 3)).ok());
}

TEST(SyncNetwork, InboxesInAscendingSenderOrder) {
  const WeightMatrix w(StarWeights());
  ObservationLog log;
  SyncNetwork net(w.adjacency(), &log);
  std::vector<Vector> out;
  for (int i = 0; i < 4; ++i) out.push_back(Vector::Constant(2, i));
  std::vector<Inbox> inboxes;
  net.Deliver(out, &inboxes, "test", {{"gamma", 0.5}});
  ASSERT_EQ(inboxes.size(), 4u);
  ASSERT_EQ(inboxes[0].size(), 3u);
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(inboxes[0][static_cast<size_t>(j)].sender, j + 1);
    EXPECT_EQ(*inboxes[0][static_cast<size_t>(j)].message,
              Vector::Constant(2, j + 1));
  }
  ASSERT_EQ(inboxes[2].size(), 1u);
  EXPECT_EQ(inboxes[2][0].sender, 0);
  EXPECT_EQ(net.rounds(), 1);

  ASSERT_EQ(log.rounds.size(), 1u);
  EXPECT_EQ(log.rounds[0].channel, "test");
  EXPECT_DOUBLE_EQ(log.rounds[0].PublicValue("gamma"), 0.5);
  EXPECT_THROW(log.rounds[0].PublicValue("chi"), std::out_of_range);
  EXPECT_EQ(log.rounds[0].records[0].receivers, (std::vector<int>{1, 2, 3}));
}

TEST(SyncNetwork, MissingMessageIsAnError) {
  const WeightMatrix w(StarWeights());
  SyncNetwork net(w.adjacency());
  std::vector<Inbox> inboxes;
  std::vector<Vector> out(3, Vector::Zero(1));
  EXPECT_THROW(net.Deliver(out, &inboxes), NetworkError);
  out.push_back(Vector());
  EXPECT_THROW(net.Deliver(out, &inboxes), NetworkError);
}

TEST(SyncNetwork, ReplayIsBitExact) {
  const WeightMatrix w(testing::ReferenceConfig().weights);
  ObservationLog log;
  SyncNetwork net(w.adjacency(), &log);
  std::mt19937_64 gen(8);
  std::normal_distribution<double> nd;
  std::vector<std::vector<std::vector<std::pair<int, Vector>>>> seen;
  for (int round = 0; round < 5; ++round) {
    std::vector<Vector> out;
    for (int i = 0; i < 4; ++i) {
      Vector v(3);
      for (int k = 0; k < 3; ++k) v(k) = nd(gen);
      out.push_back(v);
    }
    std::vector<Inbox> inboxes;
    net.Deliver(out, &inboxes, "c");
    seen.emplace_back();
    for (const Inbox& inbox : inboxes) {
      seen.back().emplace_back();
      for (const InboxEntry& e : inbox) {
        seen.back().back().emplace_back(e.sender, *e.message);
      }
    }
  }
  EXPECT_EQ(ReplayLog(log, w.adjacency()), seen);

  std::ostringstream csv;
  log.WriteCsv(csv);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "network.round,network.channel,network.sender,network.receivers,"
            "network.message[0],network.message[1],network.message[2]");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 5 * 4);
}

}  // namespace
}  // namespace dpdmpc
