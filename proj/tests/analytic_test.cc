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
//
// The closed forms here are checked against quadrature and a numeric
// convolution, never against themselves.

#include "invdp/analytic.h"

#include <cmath>
#include <functional>

#include "gtest/gtest.h"

namespace invdp {
namespace {

double LaplacePdf(double x, double scale) {
  return std::exp(-std::abs(x) / scale) / (2.0 * scale);
}

// Composite Simpson rule; n must be even.
double Simpson(const std::function<double(double)>& f, double lo, double hi,
               int n) {
  const double h = (hi - lo) / n;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) {
    sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

// Density of beta*u1 - (1-beta)*u2 with u_i iid Laplace(2/eps), evaluated by
// convolving the two scaled Laplace densities, splitting at both kinks.
double ConvolutionOracle(double u, double eps, double beta) {
  const double b1 = 2.0 * beta / eps;
  const double b2 = 2.0 * (1.0 - beta) / eps;
  const auto integrand = [&](double t) {
    return LaplacePdf(u - t, b1) * LaplacePdf(t, b2);
  };
  const double r = 60.0 * std::max(b1, b2);
  const double k0 = std::min(0.0, u);
  const double k1 = std::max(0.0, u);
  double total = 0.0;
  if (k0 > -r) total += Simpson(integrand, -r, k0, 20000);
  if (k1 > k0) total += Simpson(integrand, k0, k1, 20000);
  if (r > k1) total += Simpson(integrand, k1, r, 20000);
  return total;
}

TEST(TwoBinConditionalTest, DensityIsLaplaceAtFullBudget) {
  const double eps = 1.0;
  EXPECT_NEAR(TwoBinConditionalDensity(3.0, 3.0, eps), 0.5, 1e-12);
  EXPECT_NEAR(TwoBinConditionalDensity(4.0, 3.0, eps), 0.5 * std::exp(-1.0),
              1e-12);
  EXPECT_NEAR(TwoBinConditionalDensity(1.0, 3.0, eps), 0.5 * std::exp(-2.0),
              1e-12);

  const double mass = Simpson(
      [&](double v) { return TwoBinConditionalDensity(v, 3.0, eps); }, -60.0,
      3.0, 100000) +
      Simpson([&](double v) { return TwoBinConditionalDensity(v, 3.0, eps); },
              3.0, 66.0, 100000);
  EXPECT_NEAR(mass, 1.0, 1e-10);
}

TEST(TwoBinConditionalTest, VarianceMatchesQuadrature) {
  const double eps = 0.8;
  const auto second_moment = [&](double v) {
    const double centered = v - 3.0;
    return centered * centered * TwoBinConditionalDensity(v, 3.0, eps);
  };
  const double var = Simpson(second_moment, 3.0 - 80.0, 3.0, 200000) +
                     Simpson(second_moment, 3.0, 3.0 + 80.0, 200000);
  EXPECT_NEAR(TwoBinConditionalVariance(eps), var, 1e-6);
  EXPECT_NEAR(TwoBinConditionalVariance(1.0), 2.0, 1e-12);
}

TEST(ComboDensityTest, NormalizesForRepresentativeWeights) {
  const double eps = 1.0;
  for (const double beta : {0.5, 0.55, 0.7, 0.9, 1.0}) {
    const auto f = [&](double u) { return TwoBinComboDensity(u, eps, beta); };
    const double r = 150.0;
    const double mass = Simpson(f, -r, 0.0, 200000) + Simpson(f, 0.0, r, 200000);
    EXPECT_NEAR(mass, 1.0, 1e-8) << "beta " << beta;
  }
}

TEST(ComboDensityTest, BalancedWeightUsesExactLimit) {
  const double eps = 1.3;
  for (double u = -12.0; u <= 12.0; u += 0.25) {
    const double want =
        (eps / 4.0) * (1.0 + eps * std::abs(u)) * std::exp(-eps * std::abs(u));
    EXPECT_NEAR(TwoBinComboDensity(u, eps, 0.5), want, 1e-12) << "u " << u;
  }
  // Just off balance the density must approach the limit continuously.
  EXPECT_NEAR(TwoBinComboDensity(1.0, eps, 0.5 + 4e-7),
              TwoBinComboDensity(1.0, eps, 0.5), 1e-6);
}

TEST(ComboDensityTest, MatchesNumericConvolution) {
  const double eps = 1.0;
  const double beta = 0.7;
  for (double u = -20.0; u <= 20.0 + 1e-9; u += 2.5) {
    EXPECT_NEAR(TwoBinComboDensity(u, eps, beta),
                ConvolutionOracle(u, eps, beta), 1e-6)
        << "u " << u;
  }
}

TEST(ComboDensityTest, IsSymmetricAndPeaksAtZero) {
  const double eps = 0.9;
  for (const double beta : {0.6, 0.8}) {
    for (double u = 0.5; u <= 20.0; u += 0.5) {
      EXPECT_NEAR(TwoBinComboDensity(u, eps, beta),
                  TwoBinComboDensity(-u, eps, beta), 1e-14);
      EXPECT_LT(TwoBinComboDensity(u, eps, beta),
                TwoBinComboDensity(0.0, eps, beta));
    }
  }
}

TEST(ComboVarianceTest, MatchesQuadratureAndEndpoints) {
  const double eps = 1.0;
  for (const double beta : {0.5, 0.7, 1.0}) {
    const auto second_moment = [&](double u) {
      return u * u * TwoBinComboDensity(u, eps, beta);
    };
    const double var = Simpson(second_moment, -150.0, 0.0, 300000) +
                       Simpson(second_moment, 0.0, 150.0, 300000);
    EXPECT_NEAR(TwoBinComboVariance(eps, beta), var, 1e-5) << "beta " << beta;
  }
  // beta = 1 reads one cell: variance of a single Laplace(2/eps).
  EXPECT_NEAR(TwoBinComboVariance(2.0, 1.0), 2.0, 1e-12);
  EXPECT_NEAR(TwoBinComboVariance(1.0, 0.5), 4.0, 1e-12);
}

TEST(AttainedBudgetTest, PeaksAtBalancedWeight) {
  EXPECT_NEAR(TwoBinComboAttainedBudget(1.0, 0.5), 1.0, 1e-15);
  EXPECT_NEAR(TwoBinComboAttainedBudget(1.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(TwoBinComboAttainedBudget(1.0, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(TwoBinComboAttainedBudget(1.0, 0.7), 1.0 / 1.4, 1e-15);
  EXPECT_GT(TwoBinComboAttainedBudget(1.0, 0.5),
            TwoBinComboAttainedBudget(1.0, 0.51));
}

TEST(ShiftRatioTest, LaplaceAttainsItsBoundExactly) {
  const double scale = 2.0;
  const double alpha = 1.0 / scale;
  const auto density = [&](double x) { return LaplacePdf(x, scale); };
  const ShiftRatioReport report =
      VerifyShiftRatioBound(density, alpha, 1.0, 0.0, 40.0, 0.01);
  EXPECT_TRUE(report.holds);
  EXPECT_TRUE(report.decreasing_in_magnitude);
  EXPECT_TRUE(report.envelope_increasing);
  EXPECT_NEAR(report.sup_log_ratio, report.bound, 1e-9);
  EXPECT_NEAR(report.bound, alpha, 1e-15);
}

TEST(ShiftRatioTest, HoldsAtAttainedBudgetForComboFamily) {
  const double eps = 1.0;
  for (const double beta : {0.5, 0.6, 0.8, 1.0}) {
    const double alpha = TwoBinComboAttainedBudget(eps, beta);
    const auto density = [&](double u) {
      return TwoBinComboDensity(u, eps, beta);
    };
    const ShiftRatioReport report =
        VerifyShiftRatioBound(density, alpha, 1.0, 0.0, 40.0 / eps, 0.01);
    EXPECT_TRUE(report.holds) << "beta " << beta;
    EXPECT_TRUE(report.decreasing_in_magnitude) << "beta " << beta;
    EXPECT_TRUE(report.envelope_increasing) << "beta " << beta;
    EXPECT_LE(report.sup_log_ratio, report.bound + 1e-9) << "beta " << beta;
  }
}

TEST(ShiftRatioTest, EnvelopeFailsJustBelowAttainedBudget) {
  const double eps = 1.0;
  for (const double beta : {0.5, 0.6, 0.8, 1.0}) {
    const double alpha = 0.95 * TwoBinComboAttainedBudget(eps, beta);
    const auto density = [&](double u) {
      return TwoBinComboDensity(u, eps, beta);
    };
    const ShiftRatioReport report =
        VerifyShiftRatioBound(density, alpha, 1.0, 0.0, 40.0 / eps, 0.01);
    EXPECT_FALSE(report.envelope_increasing) << "beta " << beta;
    EXPECT_TRUE(report.has_witness) << "beta " << beta;
    EXPECT_GT(std::abs(report.witness), 0.0) << "beta " << beta;
  }
}

}  // namespace
}  // namespace invdp
