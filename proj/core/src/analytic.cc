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

#include "invdp/analytic.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace invdp {
namespace {

constexpr double kBalancedWindow = 1e-6;   // |2 beta - 1| below this -> limit
constexpr double kMonotoneSlack = 1e-9;    // relative slack for grid checks
constexpr double kRatioSlack = 1e-9;       // absolute slack on the sup bound

void CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive and finite");
  }
}

void CheckBeta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("beta must lie in [0, 1]");
  }
}

}  // namespace

double TwoBinConditionalDensity(double value, double first_cell,
                                double epsilon) {
  CheckEpsilon(epsilon);
  return 0.5 * epsilon * std::exp(-epsilon * std::abs(value - first_cell));
}

double TwoBinConditionalVariance(double epsilon) {
  CheckEpsilon(epsilon);
  return 2.0 / (epsilon * epsilon);
}

double TwoBinComboDensity(double u, double epsilon, double beta) {
  CheckEpsilon(epsilon);
  CheckBeta(beta);
  const double mag = std::abs(u);
  const double balance = 2.0 * beta - 1.0;
  if (std::abs(balance) < kBalancedWindow) {
    // Limit of the two-rate mixture as the rates coincide.
    return 0.25 * epsilon * (1.0 + epsilon * mag) * std::exp(-epsilon * mag);
  }
  const double first =
      beta == 0.0 ? 0.0 : beta * std::exp(-epsilon * mag / (2.0 * beta));
  const double second =
      beta == 1.0 ? 0.0
                  : (1.0 - beta) *
                        std::exp(-epsilon * mag / (2.0 * (1.0 - beta)));
  return epsilon / (4.0 * balance) * (first - second);
}

double TwoBinComboVariance(double epsilon, double beta) {
  CheckEpsilon(epsilon);
  CheckBeta(beta);
  return (beta * beta + (1.0 - beta) * (1.0 - beta)) * 8.0 /
         (epsilon * epsilon);
}

double TwoBinComboAttainedBudget(double epsilon, double beta) {
  CheckEpsilon(epsilon);
  CheckBeta(beta);
  return epsilon / (2.0 * std::max(beta, 1.0 - beta));
}

ShiftRatioReport VerifyShiftRatioBound(
    const std::function<double(double)>& density, double alpha, double shift_a,
    double shift_b, double grid_half_width, double grid_step) {
  if (!(alpha > 0.0) || !(grid_half_width > 0.0) || !(grid_step > 0.0)) {
    throw std::invalid_argument(
        "VerifyShiftRatioBound: need positive alpha, half width and step");
  }
  ShiftRatioReport report;
  report.bound = alpha * std::abs(shift_a - shift_b);
  report.decreasing_in_magnitude = true;
  report.envelope_increasing = true;

  const long long half_steps =
      static_cast<long long>(std::ceil(grid_half_width / grid_step));
  double sup = -std::numeric_limits<double>::infinity();
  for (long long k = -half_steps; k <= half_steps; ++k) {
    const double x = k * grid_step;
    const double fa = density(x - shift_a);
    const double fb = density(x - shift_b);
    if (!(fa > 0.0) || !(fb > 0.0)) {
      throw std::invalid_argument(
          "VerifyShiftRatioBound: density must be positive on the grid");
    }
    sup = std::max(sup, std::log(fa) - std::log(fb));
  }
  report.sup_log_ratio = sup;
  report.holds = sup <= report.bound + kRatioSlack;

  // Monotonicity along the magnitude ray; the densities here are symmetric,
  // so one ray is the whole story.
  double prev_f = density(0.0);
  double prev_g = prev_f;  // e^{alpha * 0} = 1
  for (long long k = 1; k <= half_steps; ++k) {
    const double x = k * grid_step;
    const double f = density(x);
    const double g = f * std::exp(alpha * x);
    if (report.decreasing_in_magnitude &&
        f > prev_f * (1.0 + kMonotoneSlack) + 1e-300) {
      report.decreasing_in_magnitude = false;
      if (!report.has_witness) {
        report.witness = x;
        report.has_witness = true;
      }
    }
    if (report.envelope_increasing &&
        g < prev_g * (1.0 - kMonotoneSlack) - 1e-300) {
      report.envelope_increasing = false;
      if (!report.has_witness) {
        report.witness = x;
        report.has_witness = true;
      }
    }
    prev_f = f;
    prev_g = g;
  }
  return report;
}

}  // namespace invdp
