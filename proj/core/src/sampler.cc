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

#include "invdp/sampler.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace invdp {
namespace {

constexpr double kCompletionSnapTolerance = 1e-6;
// Tail mass below ~1e-18 per side; everything further out takes the
// closed-form quantile path.
constexpr double kTableTailLogMass = -41.45;
constexpr int kTableMaxHalfWidth = 1 << 20;

bool IsIntegral(double x) { return std::isfinite(x) && x == std::nearbyint(x); }

}  // namespace

ConditionalReleaseSampler::ConditionalReleaseSampler(
    const QueryVector& confidential, const NoiseMechanism& base,
    LinearInvariantSystem system, std::optional<ProposalIndexSet> index_set,
    std::optional<double> proposal_epsilon)
    : confidential_(confidential),
      system_(std::move(system)),
      index_(index_set.has_value() ? std::move(*index_set)
                                   : AutoSelectIndexSet(system_)) {
  if (base.kind() != MechanismKind::kDoubleGeometric) {
    throw std::invalid_argument(
        "ConditionalReleaseSampler: base mechanism must be double-geometric");
  }
  if (!system_.integer_valued()) {
    throw std::invalid_argument(
        "ConditionalReleaseSampler: invariant system must be integer-valued");
  }
  if (confidential_.size() != system_.dimension()) {
    throw std::invalid_argument(
        "ConditionalReleaseSampler: confidential vector has wrong dimension");
  }
  for (Eigen::Index i = 0; i < confidential_.size(); ++i) {
    if (!IsIntegral(confidential_[i])) {
      throw std::invalid_argument(
          "ConditionalReleaseSampler: confidential vector must be integral");
    }
  }
  if (!Satisfies(confidential_, system_, 0.0)) {
    throw std::invalid_argument(
        "ConditionalReleaseSampler: confidential vector violates the system");
  }

  if (!ValidateIndexSet(index_, system_)) {
    throw std::invalid_argument(
        "ConditionalReleaseSampler: invalid proposal index set");
  }
  complement_ = index_.Complement(system_.dimension());

  proposal_epsilon_ = proposal_epsilon.value_or(base.epsilon());
  if (!(proposal_epsilon_ > 0.0) || !std::isfinite(proposal_epsilon_)) {
    throw std::invalid_argument(
        "ConditionalReleaseSampler: proposal budget must be positive");
  }
  log_decay_base_ = base.log_decay();
  log_decay_proposal_ = -proposal_epsilon_ / base.sensitivity();
  proposal_decay_ = std::exp(log_decay_proposal_);

  const int d_a = system_.num_equalities();
  const int nf = index_.size();
  confidential_free_.resize(nf);
  for (int j = 0; j < nf; ++j) {
    confidential_free_[j] = confidential_[index_.indices()[j]];
  }
  confidential_pinned_.resize(d_a);
  Eigen::MatrixXd pinned_block(d_a, d_a);
  for (int j = 0; j < d_a; ++j) {
    confidential_pinned_[j] = confidential_[complement_[j]];
    pinned_block.col(j) = system_.equality_matrix().col(complement_[j]);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(pinned_block);
  Eigen::MatrixXd free_block(d_a, nf);
  for (int j = 0; j < nf; ++j) {
    free_block.col(j) = system_.equality_matrix().col(index_.indices()[j]);
  }
  completion_offset_ = lu.solve(system_.equality_rhs());
  completion_matrix_ = -lu.solve(free_block);

  // Inverse-CDF table over the bulk of the proposal noise support.
  int half_width = static_cast<int>(
      std::ceil(kTableTailLogMass / log_decay_proposal_)) + 2;
  half_width = std::min(half_width, kTableMaxHalfWidth);
  table_min_ = -half_width;
  table_cdf_.resize(2 * half_width + 1);
  for (int k = 0; k < static_cast<int>(table_cdf_.size()); ++k) {
    table_cdf_[k] = DoubleGeometricCdf(table_min_ + k, proposal_decay_);
  }

  scratch_free_.resize(nf);
  scratch_pinned_.resize(d_a);
  scratch_full_.resize(system_.dimension());
  Reset();
}

void ConditionalReleaseSampler::Reset() {
  state_ = confidential_;
  state_l1_full_ = 0.0;
  state_l1_free_ = 0.0;
  diagnostics_ = ChainDiagnostics{};
}

double ConditionalReleaseSampler::SampleProposalNoise(double v) const {
  if (v <= table_cdf_.front() || v > table_cdf_.back()) {
    return DoubleGeometricQuantile(v, proposal_decay_);
  }
  const auto it = std::lower_bound(table_cdf_.begin(), table_cdf_.end(), v);
  return table_min_ + static_cast<int>(it - table_cdf_.begin());
}

bool ConditionalReleaseSampler::Step(Rng& rng) {
  ++diagnostics_.proposals;
  const int nf = index_.size();
  const int d_a = system_.num_equalities();

  double l1_free = 0.0;
  for (int j = 0; j < nf; ++j) {
    const double noise = SampleProposalNoise(rng.NextUniform());
    scratch_free_[j] = confidential_free_[j] + noise;
    l1_free += std::abs(noise);
  }
  scratch_pinned_.noalias() = completion_offset_;
  scratch_pinned_.noalias() += completion_matrix_ * scratch_free_;

  bool feasible = true;
  double l1_full = l1_free;
  for (int j = 0; j < d_a; ++j) {
    const double snapped = std::nearbyint(scratch_pinned_[j]);
    if (std::abs(scratch_pinned_[j] - snapped) > kCompletionSnapTolerance) {
      // Off-lattice completion: zero mass under the integer base law.
      feasible = false;
      break;
    }
    scratch_pinned_[j] = snapped;
    l1_full += std::abs(snapped - confidential_pinned_[j]);
  }

  if (feasible && system_.has_inequalities()) {
    for (int j = 0; j < nf; ++j) {
      scratch_full_[index_.indices()[j]] = scratch_free_[j];
    }
    for (int j = 0; j < d_a; ++j) {
      scratch_full_[complement_[j]] = scratch_pinned_[j];
    }
    if (system_.nonnegativity_only()) {
      feasible = scratch_full_.minCoeff() >= 0.0;
    } else {
      const Eigen::VectorXd slack =
          system_.inequality_matrix() * scratch_full_ -
          system_.inequality_rhs();
      feasible = slack.minCoeff() >= 0.0;
    }
  } else if (feasible) {
    for (int j = 0; j < nf; ++j) {
      scratch_full_[index_.indices()[j]] = scratch_free_[j];
    }
    for (int j = 0; j < d_a; ++j) {
      scratch_full_[complement_[j]] = scratch_pinned_[j];
    }
  }

  // The acceptance uniform is drawn on every step (see the contract in the
  // header), even when the proposal is already dead.
  const double u = rng.NextUniform();
  if (!feasible) return false;

  const double log_alpha =
      log_decay_base_ * (l1_full - state_l1_full_) -
      log_decay_proposal_ * (l1_free - state_l1_free_);
  if (std::log(u) >= log_alpha) return false;

  std::swap(state_, scratch_full_);
  state_l1_full_ = l1_full;
  state_l1_free_ = l1_free;
  ++diagnostics_.accepted;
  return true;
}

const QueryVector& ConditionalReleaseSampler::Run(Rng& rng, long long steps) {
  for (long long i = 0; i < steps; ++i) Step(rng);
  return state_;
}

RejectionSampleResult RejectionSample(const QueryVector& confidential,
                                      const NoiseMechanism& base,
                                      const LinearInvariantSystem& system,
                                      long long max_tries, Rng& rng) {
  if (max_tries < 1) {
    throw std::invalid_argument("RejectionSample: max_tries must be >= 1");
  }
  RejectionSampleResult result;
  for (long long t = 1; t <= max_tries; ++t) {
    QueryVector candidate = Privatize(confidential, base, rng);
    if (Satisfies(candidate, system)) {
      result.success = true;
      result.release = std::move(candidate);
      result.attempts = t;
      return result;
    }
  }
  result.attempts = max_tries;
  return result;
}

ChainOutput RunChain(ConditionalReleaseSampler& sampler, uint64_t seed,
                     long long nsim, std::optional<long long> burn_in) {
  if (nsim < 1) throw std::invalid_argument("RunChain: nsim must be >= 1");
  const long long burn = burn_in.value_or(nsim / 10);
  if (burn < 0 || burn >= nsim) {
    throw std::invalid_argument("RunChain: burn-in must lie in [0, nsim)");
  }
  ChainOutput out;
  out.seed = seed;
  out.burn_in = burn;
  out.draws.reserve(nsim);
  Rng rng(seed);
  sampler.Reset();
  for (long long t = 0; t < nsim; ++t) {
    sampler.Step(rng);
    out.draws.push_back(sampler.state());
  }
  out.acceptance_count = sampler.diagnostics().accepted;
  out.acceptance_rate = sampler.diagnostics().acceptance_rate();
  return out;
}

std::vector<SweepPoint> AcceptanceSweep(
    const QueryVector& confidential, const NoiseMechanism& base,
    const LinearInvariantSystem& system,
    const std::optional<ProposalIndexSet>& index_set,
    const std::vector<double>& proposal_grid, long long nsim,
    uint64_t master_seed) {
  if (nsim < 1) {
    throw std::invalid_argument("AcceptanceSweep: nsim must be >= 1");
  }
  std::vector<SweepPoint> points;
  points.reserve(proposal_grid.size());
  const Rng master(master_seed);
  for (size_t i = 0; i < proposal_grid.size(); ++i) {
    ConditionalReleaseSampler sampler(confidential, base, system, index_set,
                                      proposal_grid[i]);
    // Substreams keyed by the budget's bit pattern, not the grid position,
    // so a reordered or split grid reproduces the same per-point values.
    Rng rng = master.Substream(std::bit_cast<uint64_t>(proposal_grid[i]));
    sampler.Run(rng, nsim);
    points.push_back(
        {proposal_grid[i], sampler.diagnostics().acceptance_rate()});
  }
  return points;
}

}  // namespace invdp
