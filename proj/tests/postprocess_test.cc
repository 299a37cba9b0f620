// Copyright 2026 The invdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "invdp/postprocess.h"

#include <cmath>

#include "gtest/gtest.h"
#include "invdp/experiments.h"
#include "invdp/rng.h"

namespace invdp {
namespace {

LinearInvariantSystem SumSystem(double total, bool nonnegative) {
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  Eigen::VectorXd rhs(1);
  rhs << total;
  if (!nonnegative) return LinearInvariantSystem::EqualityOnly(a, rhs);
  return LinearInvariantSystem::Create(
      a, rhs, Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2));
}

TEST(L2ProjectEqualityTest, ProjectsOntoSumManifold) {
  Eigen::VectorXd release(2);
  release << 3, 5;
  const QueryVector projected =
      L2ProjectEquality(release, SumSystem(6, false));
  EXPECT_NEAR(projected[0], 2.0, 1e-12);
  EXPECT_NEAR(projected[1], 4.0, 1e-12);
}

TEST(L2ProjectEqualityTest, IsIdempotent) {
  Eigen::VectorXd release(2);
  release << 3, 5;
  const LinearInvariantSystem system = SumSystem(6, false);
  const QueryVector once = L2ProjectEquality(release, system);
  const QueryVector twice = L2ProjectEquality(once, system);
  EXPECT_NEAR((once - twice).norm(), 0.0, 1e-12);
}

TEST(L2ProjectEqualityTest, ResidualIsOrthogonalToManifold) {
  Rng table_rng(3);
  const ContingencyTable table = SampleSyntheticTable(2, 23, table_rng);
  const LinearInvariantSystem system = MakeDemographicInvariants(table, 4);
  const QueryVector confidential = table.Vectorized();

  Rng noise_rng(4);
  const NoiseMechanism mech = NoiseMechanism::DoubleGeometric(1.0);
  const QueryVector release = Privatize(confidential, mech, noise_rng);
  const QueryVector projected = L2ProjectEquality(release, system);

  EXPECT_TRUE(Satisfies(projected, system, 1e-8));
  // The correction lives in the row space of A: A z = A (release - projected)
  // reproduces the full equality violation, and the projection is no farther
  // from the release than any other feasible point, e.g. the confidential one.
  EXPECT_LE((projected - release).norm(),
            (confidential - release).norm() + 1e-12);
}

TEST(NonnegativeL2ProjectTest, ClipsNegativeCellAndReallocates) {
  Eigen::VectorXd release(2);
  release << -1, 7;
  const NonnegativeProjectionResult result =
      NonnegativeL2Project(release, SumSystem(6, true));
  EXPECT_TRUE(result.converged);
  EXPECT_NEAR(result.solution[0], 0.0, 1e-12);
  EXPECT_NEAR(result.solution[1], 6.0, 1e-12);
  EXPECT_LE(result.kkt_residual, 1e-9);
}

TEST(NonnegativeL2ProjectTest, MatchesEqualityProjectionInInterior) {
  Eigen::VectorXd release(2);
  release << 3, 5;
  const NonnegativeProjectionResult result =
      NonnegativeL2Project(release, SumSystem(6, true));
  EXPECT_TRUE(result.converged);
  EXPECT_NEAR(result.solution[0], 2.0, 1e-12);
  EXPECT_NEAR(result.solution[1], 4.0, 1e-12);
}

TEST(NonnegativeL2ProjectTest, DominatesOtherFeasiblePoints) {
  Rng table_rng(7);
  const ContingencyTable table = SampleSyntheticTable(2, 23, table_rng);
  const LinearInvariantSystem system = MakeDemographicInvariants(table, 4);
  const QueryVector confidential = table.Vectorized();

  const NoiseMechanism mech = NoiseMechanism::DoubleGeometric(0.3);
  Rng noise_rng(8);
  const QueryVector release = Privatize(confidential, mech, noise_rng);
  const NonnegativeProjectionResult result =
      NonnegativeL2Project(release, system);
  ASSERT_TRUE(result.converged);
  EXPECT_TRUE(Satisfies(result.solution, system, 1e-6));
  EXPECT_LE(result.kkt_residual, 1e-6);

  const double solution_distance = (result.solution - release).norm();
  EXPECT_LE(solution_distance, (confidential - release).norm() + 1e-9);

  // Feasible competitors: equality-projected small perturbations of the
  // confidential table, kept only when they stay nonnegative.
  Rng competitor_rng(9);
  int compared = 0;
  for (int trial = 0; trial < 200 && compared < 50; ++trial) {
    QueryVector candidate = confidential;
    for (int i = 0; i < candidate.size(); ++i) {
      candidate[i] += 2.0 * competitor_rng.NextUniform() - 1.0;
    }
    candidate = L2ProjectEquality(candidate, system);
    if (candidate.minCoeff() < 0.0) continue;
    ++compared;
    EXPECT_LE(solution_distance, (candidate - release).norm() + 1e-9);
  }
  EXPECT_GT(compared, 0);
}

TEST(NonnegativeL2ProjectTest, KeepsBindingSetConsistent) {
  // All mass pushed to one heavily negative corner still converges.
  Eigen::VectorXd release(4);
  release << -10, -10, -10, 42;
  Eigen::MatrixXd a(1, 4);
  a << 1, 1, 1, 1;
  Eigen::VectorXd rhs(1);
  rhs << 12;
  const LinearInvariantSystem system = LinearInvariantSystem::Create(
      a, rhs, Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4));
  const NonnegativeProjectionResult result =
      NonnegativeL2Project(release, system);
  EXPECT_TRUE(result.converged);
  EXPECT_NEAR(result.solution[0], 0.0, 1e-10);
  EXPECT_NEAR(result.solution[1], 0.0, 1e-10);
  EXPECT_NEAR(result.solution[2], 0.0, 1e-10);
  EXPECT_NEAR(result.solution[3], 12.0, 1e-10);
  EXPECT_LE(result.kkt_residual, 1e-9);
}

TEST(TwoBinWeightedTest, BlendsDirectAndImpliedReadings) {
  Eigen::VectorXd noisy(2);
  noisy << 4, 1;
  EXPECT_NEAR(TwoBinWeightedFirstCell(noisy, 6.0, 0.25), 4.75, 1e-12);
  EXPECT_NEAR(TwoBinWeightedFirstCell(noisy, 6.0, 1.0), 4.0, 1e-12);
  EXPECT_NEAR(TwoBinWeightedFirstCell(noisy, 6.0, 0.0), 5.0, 1e-12);

  const QueryVector release = TwoBinWeightedRelease(noisy, 6.0, 0.25);
  EXPECT_NEAR(release[0] + release[1], 6.0, 1e-12);
  EXPECT_NEAR(release[0], 4.75, 1e-12);
}

}  // namespace
}  // namespace invdp
