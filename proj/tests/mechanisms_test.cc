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

#include "invdp/mechanisms.h"

#include <cmath>
#include <stdexcept>

#include "gtest/gtest.h"
#include "invdp/rng.h"

namespace invdp {
namespace {

// Hand-checked values at decay 1/2: mass (1-a)/(1+a) a^|u| gives 1/3 at the
// origin and 1/6 one step out.
TEST(DoubleGeometricTest, PmfMatchesClosedFormAtHalfDecay) {
  EXPECT_NEAR(DoubleGeometricPmf(0, 0.5), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(DoubleGeometricPmf(1, 0.5), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(DoubleGeometricPmf(-1, 0.5), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(DoubleGeometricPmf(2, 0.5), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(DoubleGeometricLogPmf(2, 0.5), std::log(1.0 / 12.0), 1e-12);
}

TEST(DoubleGeometricTest, PmfSumsToOne) {
  for (const double a : {0.1, 0.5, std::exp(-1.0), 0.95}) {
    double sum = 0.0;
    for (int u = -2000; u <= 2000; ++u) sum += DoubleGeometricPmf(u, a);
    EXPECT_NEAR(sum, 1.0, 1e-10) << "decay " << a;
  }
}

TEST(DoubleGeometricTest, CdfMatchesClosedFormAtHalfDecay) {
  EXPECT_NEAR(DoubleGeometricCdf(0, 0.5), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(DoubleGeometricCdf(-1, 0.5), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(DoubleGeometricCdf(1, 0.5), 5.0 / 6.0, 1e-15);
}

TEST(DoubleGeometricTest, CdfIncrementsArePmf) {
  const double a = std::exp(-0.7);
  for (int u = -20; u <= 20; ++u) {
    EXPECT_NEAR(DoubleGeometricCdf(u, a) - DoubleGeometricCdf(u - 1, a),
                DoubleGeometricPmf(u, a), 1e-14)
        << "u " << u;
  }
}

TEST(DoubleGeometricTest, QuantileMatchesSpotChecks) {
  EXPECT_EQ(DoubleGeometricQuantile(0.2, 0.5), -1);
  EXPECT_EQ(DoubleGeometricQuantile(1.0 / 1.5, 0.5), 0);
  EXPECT_EQ(DoubleGeometricQuantile(0.5, 0.5), 0);
  EXPECT_EQ(DoubleGeometricQuantile(0.8, 0.5), 1);
  EXPECT_EQ(DoubleGeometricQuantile(0.9, 0.5), 2);
}

TEST(DoubleGeometricTest, QuantileInvertsCdf) {
  for (const double a : {0.3, 0.5, std::exp(-1.0)}) {
    for (int u = -8; u <= 8; ++u) {
      const double v = DoubleGeometricCdf(u, a);
      EXPECT_EQ(DoubleGeometricQuantile(v, a), u) << "a " << a << " u " << u;
      // Just past the jump the quantile moves to the next support point.
      EXPECT_EQ(DoubleGeometricQuantile(v + 1e-9, a), u + 1)
          << "a " << a << " u " << u;
    }
  }
}

TEST(DoubleGeometricTest, QuantileIsMonotone) {
  const double a = std::exp(-0.5);
  int prev = DoubleGeometricQuantile(1e-6, a);
  for (double v = 1e-6; v < 1.0; v += 1e-3) {
    const int q = DoubleGeometricQuantile(v, a);
    ASSERT_GE(q, prev);
    prev = q;
  }
}

TEST(DoubleGeometricTest, SuccessiveMassRatioIsDecay) {
  const NoiseMechanism mech = NoiseMechanism::DoubleGeometric(1.0, 1.0);
  for (int u = 0; u < 40; ++u) {
    const double ratio =
        DoubleGeometricPmf(u + 1, mech) / DoubleGeometricPmf(u, mech);
    EXPECT_NEAR(ratio, std::exp(-1.0), 1e-12) << "u " << u;
  }
}

TEST(NoiseMechanismTest, AccessorsReflectBudgetAndSensitivity) {
  const NoiseMechanism dg = NoiseMechanism::DoubleGeometric(0.5, 2.0);
  EXPECT_DOUBLE_EQ(dg.epsilon(), 0.5);
  EXPECT_DOUBLE_EQ(dg.sensitivity(), 2.0);
  EXPECT_NEAR(dg.decay(), std::exp(-0.25), 1e-15);
  EXPECT_NEAR(dg.log_decay(), -0.25, 1e-15);

  const NoiseMechanism lap = NoiseMechanism::Laplace(0.5, 2.0);
  EXPECT_NEAR(lap.scale(), 4.0, 1e-15);
}

TEST(NoiseMechanismTest, RejectsNonpositiveParameters) {
  EXPECT_THROW(NoiseMechanism::DoubleGeometric(0.0), std::invalid_argument);
  EXPECT_THROW(NoiseMechanism::DoubleGeometric(-1.0), std::invalid_argument);
  EXPECT_THROW(NoiseMechanism::Laplace(1.0, 0.0), std::invalid_argument);
}

TEST(LaplaceTest, DensityMatchesClosedForm) {
  const NoiseMechanism mech = NoiseMechanism::Laplace(1.0, 1.0);
  EXPECT_NEAR(LaplaceDensity(0.0, mech), 0.5, 1e-15);
  EXPECT_NEAR(LaplaceDensity(1.0, mech), 0.5 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(LaplaceDensity(-2.0, 2.0), std::exp(-1.0) / 4.0, 1e-15);
  EXPECT_NEAR(LaplaceLogDensity(1.0, mech), std::log(0.5) - 1.0, 1e-12);
}

TEST(LaplaceTest, QuantileInvertsAtSpotValues) {
  const NoiseMechanism mech = NoiseMechanism::Laplace(1.0, 1.0);
  EXPECT_NEAR(LaplaceQuantile(0.5, mech), 0.0, 1e-15);
  EXPECT_NEAR(LaplaceQuantile(0.25, mech), std::log(0.5), 1e-12);
  EXPECT_NEAR(LaplaceQuantile(0.75, mech), -std::log(0.5), 1e-12);
  // Symmetry of the two branches around the median.
  for (double v = 0.01; v < 0.5; v += 0.01) {
    EXPECT_NEAR(LaplaceQuantile(v, mech), -LaplaceQuantile(1.0 - v, mech),
                1e-10);
  }
}

TEST(SamplingTest, DoubleGeometricMomentsMatch) {
  const NoiseMechanism mech = NoiseMechanism::DoubleGeometric(1.0, 1.0);
  const double a = mech.decay();
  const double want_var = 2.0 * a / ((1.0 - a) * (1.0 - a));
  Rng rng(123);
  const int n = 400000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const int u = SampleDoubleGeometricNoise(mech, rng);
    sum += u;
    sumsq += static_cast<double>(u) * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(want_var / n));
  EXPECT_NEAR(sumsq / n - mean * mean, want_var, 0.03 * want_var);
}

TEST(SamplingTest, LaplaceMomentsMatch) {
  const NoiseMechanism mech = NoiseMechanism::Laplace(0.5, 1.0);
  const double b = mech.scale();
  Rng rng(321);
  const int n = 400000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = SampleLaplaceNoise(mech, rng);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(2.0 * b * b / n));
  EXPECT_NEAR(sumsq / n - mean * mean, 2.0 * b * b, 0.03 * 2.0 * b * b);
}

TEST(PrivatizeTest, AddsLatticeNoiseUnderDoubleGeometric) {
  QueryVector confidential(4);
  confidential << 3, 0, 7, 2;
  const NoiseMechanism mech = NoiseMechanism::DoubleGeometric(1.0);
  Rng rng(5);
  const QueryVector release = Privatize(confidential, mech, rng);
  ASSERT_EQ(release.size(), 4);
  for (int i = 0; i < 4; ++i) {
    const double noise = release[i] - confidential[i];
    EXPECT_DOUBLE_EQ(noise, std::round(noise)) << "coordinate " << i;
  }
}

TEST(PrivatizeTest, SameSeedSameRelease) {
  QueryVector confidential(3);
  confidential << 1, 2, 3;
  const NoiseMechanism mech = NoiseMechanism::Laplace(1.0);
  Rng a(99), b(99);
  const QueryVector ra = Privatize(confidential, mech, a);
  const QueryVector rb = Privatize(confidential, mech, b);
  EXPECT_TRUE((ra.array() == rb.array()).all());
}

}  // namespace
}  // namespace invdp
