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
// Post-processing maps from unconstrained noisy releases onto invariant-
// respecting releases. Everything here consumes only the released vector and
// the public constraint system, so privacy guarantees pass through unchanged.

#ifndef INVDP_POSTPROCESS_H_
#define INVDP_POSTPROCESS_H_

#include "invdp/invariants.h"
#include "invdp/mechanisms.h"

namespace invdp {

// Orthogonal projection of `release` onto the equality manifold {s: As = a}.
// Inequalities in `system` are ignored; see NonnegativeL2Project for those.
QueryVector L2ProjectEquality(const QueryVector& release,
                              const LinearInvariantSystem& system);

struct NonnegativeProjectionResult {
  QueryVector solution;
  // Max violation across stationarity, primal feasibility, dual feasibility
  // and complementarity at the returned point.
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Solves min ||s - release||^2 subject to As = a and s >= 0 with a primal
// active-set method. `system` must either carry no inequalities or exactly
// the elementwise nonnegativity cone; general inequality blocks are not
// handled here. max_iterations <= 0 picks a dimension-based default.
NonnegativeProjectionResult NonnegativeL2Project(
    const QueryVector& release, const LinearInvariantSystem& system,
    int max_iterations = 0);

// L1-optimal combination for a two-cell release with a fixed public total:
// the first cell is estimated as beta * m1 + (1 - beta) * (total - m2),
// blending the direct reading with the one implied by the constraint.
double TwoBinWeightedFirstCell(const QueryVector& noisy, double total,
                               double beta);

// Two-cell release built from TwoBinWeightedFirstCell; always sums to total.
QueryVector TwoBinWeightedRelease(const QueryVector& noisy, double total,
                                  double beta);

}  // namespace invdp

#endif  // INVDP_POSTPROCESS_H_
