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
// Closed forms for the two-cell fixed-total setting, where every estimator of
// interest admits an exact density, and a grid certifier for the privacy
// budget attained by an arbitrary symmetric additive noise density.

#ifndef INVDP_ANALYTIC_H_
#define INVDP_ANALYTIC_H_

#include <functional>

namespace invdp {

// Density at `value` of the first cell of a two-cell Laplace release
// (per-cell budget epsilon/2) conditioned on the noise respecting the fixed
// total: a Laplace with rate epsilon centered at the confidential first cell.
double TwoBinConditionalDensity(double value, double first_cell,
                                double epsilon);

// Variance of the conditional law above: 2 / epsilon^2.
double TwoBinConditionalVariance(double epsilon);

// Density at `u` of the error of the beta-weighted two-cell combination
// beta * m1 + (1 - beta) * (total - m2) under independent per-cell Laplace
// noise at budget epsilon/2 each. The beta = 1/2 limit is handled exactly.
double TwoBinComboDensity(double u, double epsilon, double beta);

// Variance of the beta-weighted combination: (beta^2 + (1-beta)^2) * 8/eps^2.
double TwoBinComboVariance(double epsilon, double beta);

// Privacy budget actually attained by the beta-weighted combination:
// epsilon / (2 * max(beta, 1 - beta)). Equals epsilon only at beta = 1/2.
double TwoBinComboAttainedBudget(double epsilon, double beta);

struct ShiftRatioReport {
  double sup_log_ratio = 0.0;  // max over the grid of log f(x-a) - log f(x-b)
  double bound = 0.0;          // alpha * |a - b|
  bool holds = false;          // sup_log_ratio <= bound (within slack)
  bool decreasing_in_magnitude = false;  // f nonincreasing in |x|
  bool envelope_increasing = false;      // f * e^{alpha |x|} nondecreasing
  double witness = 0.0;  // magnitude where a monotonicity check first failed
  bool has_witness = false;
};

// Grid certificate that an additive noise density meets budget `alpha` for a
// shift pair (a, b): checks sup_x log[f(x-a)/f(x-b)] <= alpha * |a - b| over
// the symmetric grid [-half_width, half_width] with the given spacing, plus
// the two sufficient conditions behind that bound — f nonincreasing in |x|
// and f(x) e^{alpha |x|} nondecreasing in |x|. Probing alpha slightly below
// the attained budget makes the envelope condition fail, which pins the
// attained value from both sides.
ShiftRatioReport VerifyShiftRatioBound(
    const std::function<double(double)>& density, double alpha, double shift_a,
    double shift_b, double grid_half_width, double grid_step);

}  // namespace invdp

#endif  // INVDP_ANALYTIC_H_
