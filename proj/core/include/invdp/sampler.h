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
// Markov chain sampler for the noise distribution conditioned on a linear
// invariant system: proposals perturb a free subset of cells with integer
// double-geometric noise, the pinned cells are completed from the equality
// block, and a Metropolis correction targets the exact conditional law.

#ifndef INVDP_SAMPLER_H_
#define INVDP_SAMPLER_H_

#include <optional>
#include <vector>

#include "invdp/invariants.h"
#include "invdp/mechanisms.h"
#include "invdp/rng.h"

namespace invdp {

struct ChainDiagnostics {
  long long proposals = 0;
  long long accepted = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / proposals;
  }
};

// Draw-and-filter sampling of the conditional release: privatize the
// confidential query until the release satisfies the system. Exact but
// impractical once the constrained mass is small.
struct RejectionSampleResult {
  bool success = false;
  QueryVector release;
  long long attempts = 0;
};
RejectionSampleResult RejectionSample(const QueryVector& confidential,
                                      const NoiseMechanism& base,
                                      const LinearInvariantSystem& system,
                                      long long max_tries, Rng& rng);

// Independence-proposal Metropolis chain on the lattice points of
// S* = {s : As = a, Bs >= b} whose stationary law is the base
// double-geometric release conditioned on landing in S*.
//
// Reproducibility contract: each Step consumes exactly |I| + 1 uniforms from
// the Rng (one per proposed cell plus the acceptance draw), regardless of
// feasibility or acceptance, so seeded runs are bit-stable across refactors.
class ConditionalReleaseSampler {
 public:
  // `confidential` must satisfy the system exactly and be integral; `base`
  // must be a double-geometric mechanism (per-cell budget). If `index_set` is
  // absent one is chosen by pivoting; `proposal_epsilon` defaults to the base
  // budget.
  ConditionalReleaseSampler(const QueryVector& confidential,
                            const NoiseMechanism& base,
                            LinearInvariantSystem system,
                            std::optional<ProposalIndexSet> index_set =
                                std::nullopt,
                            std::optional<double> proposal_epsilon =
                                std::nullopt);

  int dimension() const { return static_cast<int>(confidential_.size()); }
  const ProposalIndexSet& index_set() const { return index_; }
  double proposal_epsilon() const { return proposal_epsilon_; }
  const QueryVector& state() const { return state_; }
  const ChainDiagnostics& diagnostics() const { return diagnostics_; }

  // State back to the confidential vector, diagnostics to zero.
  void Reset();

  // One proposal/accept step; returns whether the proposal was accepted.
  bool Step(Rng& rng);

  // Convenience: `steps` calls to Step, then the current state.
  const QueryVector& Run(Rng& rng, long long steps);

 private:
  double SampleProposalNoise(double v) const;

  QueryVector confidential_;
  Eigen::VectorXd confidential_free_;    // confidential at the index set
  Eigen::VectorXd confidential_pinned_;  // confidential at the complement
  LinearInvariantSystem system_;
  ProposalIndexSet index_;
  std::vector<int> complement_;
  Eigen::MatrixXd completion_matrix_;    // pinned = offset + matrix * free
  Eigen::VectorXd completion_offset_;
  double proposal_epsilon_ = 0.0;
  double log_decay_base_ = 0.0;
  double log_decay_proposal_ = 0.0;
  double proposal_decay_ = 0.0;

  // Tabulated inverse CDF of the proposal noise; values outside the window
  // fall back to the closed-form quantile, so the table is a pure speedup.
  int table_min_ = 0;
  std::vector<double> table_cdf_;

  QueryVector state_;
  double state_l1_full_ = 0.0;      // sum_j |state_j - confidential_j|
  double state_l1_free_ = 0.0;      // same restricted to the index set
  ChainDiagnostics diagnostics_;

  // Per-step scratch, preallocated.
  Eigen::VectorXd scratch_free_;
  Eigen::VectorXd scratch_pinned_;
  QueryVector scratch_full_;
};

// A full chain record: every post-step state, in order. burn_in is metadata
// for consumers (default one tenth of the run); the draws are not trimmed.
struct ChainOutput {
  std::vector<QueryVector> draws;
  long long acceptance_count = 0;
  double acceptance_rate = 0.0;
  uint64_t seed = 0;
  long long burn_in = 0;
};

// Resets the sampler, runs `nsim` steps from a fresh stream seeded with
// `seed`, and records each state.
ChainOutput RunChain(ConditionalReleaseSampler& sampler, uint64_t seed,
                     long long nsim,
                     std::optional<long long> burn_in = std::nullopt);

// Acceptance rate of a fresh chain per proposal budget, each grid point on
// its own substream of `master_seed`, so points are independent and the
// grid may be reordered or split across workers without changing values.
struct SweepPoint {
  double proposal_epsilon = 0.0;
  double acceptance_rate = 0.0;
};
std::vector<SweepPoint> AcceptanceSweep(
    const QueryVector& confidential, const NoiseMechanism& base,
    const LinearInvariantSystem& system,
    const std::optional<ProposalIndexSet>& index_set,
    const std::vector<double>& proposal_grid, long long nsim,
    uint64_t master_seed);

}  // namespace invdp

#endif  // INVDP_SAMPLER_H_
