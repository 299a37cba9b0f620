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
// Exhaustive privacy verification on small database spaces. Every database
// consistent with the published invariants is enumerated, every mechanism is
// represented by its exact release pmf, and the differential-privacy
// inequalities are checked as stated instead of sampled. Everything here is
// certificate-grade except the explicitly Monte Carlo estimators at the
// bottom, which are diagnostics and say so.

#ifndef INVDP_AUDIT_H_
#define INVDP_AUDIT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "invdp/rng.h"

namespace invdp {

// One value per record, each in {0, ..., alphabet_size - 1}.
using Database = std::vector<int>;

// Integer release vectors and their exact probabilities. Laws built from
// windowed noise pmfs may sum to slightly less than one; callers propagate
// the window's tail bound into their tolerances rather than renormalize.
using Release = std::vector<int>;
using ReleasePmf = std::map<Release, double>;

// A mechanism as a distribution: the exact release pmf for each database.
using MechanismLaw = std::function<ReleasePmf(const Database&)>;

// The finite database universe, optionally restricted to the subset
// consistent with the invariants. Enumeration is deliberate: the audit is
// exact or it is nothing, so spaces are capped at a size where exactness is
// affordable.
class DatabaseSpace {
 public:
  // Enumerates alphabet_size^num_records candidates (capped at 1e6) and
  // keeps those passing `member`; a null `member` keeps everything.
  DatabaseSpace(int num_records, int alphabet_size,
                std::function<bool(const Database&)> member = nullptr);

  int num_records() const { return num_records_; }
  int alphabet_size() const { return alphabet_size_; }

  // Members in lexicographic order.
  const std::vector<Database>& members() const { return members_; }

 private:
  int num_records_;
  int alphabet_size_;
  std::vector<Database> members_;
};

// Number of records on which x and y disagree. Sizes must match.
int HammingDistance(const Database& x, const Database& y);

// What invariants leave of the neighborhood structure:
//  - kIntact: some pair of consistent databases differs in one record.
//  - kSubstantiallyDisrupted: pairs exist, but only at distance >= 2, so
//    guarantees survive only against coarser neighbor relations.
//  - kDestroyed: at most one consistent database; nothing left to protect.
enum class NeighborhoodClass {
  kIntact,
  kSubstantiallyDisrupted,
  kDestroyed,
};

std::string ToString(NeighborhoodClass c);

struct NeighborhoodReport {
  NeighborhoodClass neighborhood_class = NeighborhoodClass::kDestroyed;
  int min_distance = 0;  // 0 when no pairs exist
};

NeighborhoodReport ClassifyNeighborhood(const DatabaseSpace& space);

// Sup over pairs of space members exactly k flips apart and over singleton
// release events of |log p_x(o) - log p_x'(o)|. For discrete laws the
// singleton sup equals the sup over all events, so this is the attained
// budget against distance-k neighbors. An outcome carrying mass under one
// law and none under the other makes the budget infinite (finite = false).
struct EmpiricalEpsilonResult {
  bool vacuous = false;  // no pairs at distance k; value meaningless
  bool finite = true;
  double value = 0.0;
};

EmpiricalEpsilonResult EmpiricalEpsilon(const MechanismLaw& law,
                                        const DatabaseSpace& space, int k);

// Same sup taken over set events: singletons plus, for every ordered pair,
// every upper level set of the outcome log-ratio (the candidates that can
// extremize a ratio of sums). Provably equal to EmpiricalEpsilon for exact
// laws; exposed so that property tests can confirm rather than assume it.
EmpiricalEpsilonResult MaxEventLogRatio(const MechanismLaw& law,
                                        const DatabaseSpace& space, int k);

// Budget inflation certified from truncation masses: the max over ordered
// distance-k pairs of log[P(M(x') in S*) / P(M(x) in S*)] divided by
// k * base_epsilon. Nonnegative by construction; any declared inflation
// gamma >= gamma_star makes the (1 + gamma) k epsilon bound valid.
struct GammaStarResult {
  bool vacuous = false;
  double value = 0.0;
};

GammaStarResult ComputeGammaStar(
    const MechanismLaw& raw_law,
    const std::function<bool(const Release&)>& in_set,
    const DatabaseSpace& space, double base_epsilon, int k);

// The raw law restricted to a release set and renormalized: the exact law
// of "rerun until the invariants hold". Throws if some member's feasible
// mass is zero, since conditioning is then undefined for it.
MechanismLaw ConditionMechanism(MechanismLaw raw_law,
                                std::function<bool(const Release&)> in_set);

// Exact Bayes check of the prior-to-posterior band for one target record
// and one release event. The adversary knows every other record: members
// are grouped into slices sharing all coordinates but target_record, the
// prior over the record's value is `record_prior` renormalized within the
// slice, and the posterior given the event must stay within
// exp(+-epsilon_budget) of that prior in every slice. For raw mechanisms
// epsilon_budget is the declared budget; for invariant-conditioned ones it
// is (1 + gamma) times it.
struct PosteriorCheckResult {
  bool event_possible = false;  // the event has positive mass somewhere
  long long slices = 0;         // slices with the event reachable
  long long checks = 0;         // (slice, value) bound evaluations
  long long violations = 0;
  double max_abs_log_ratio = 0.0;  // worst |log posterior/prior|
  double max_abs_deviation = 0.0;  // worst |posterior - prior|
  double worst_prior = 0.0;        // the pair attaining the worst ratio
  double worst_posterior = 0.0;
  bool bound_ok = false;
};

PosteriorCheckResult PosteriorAudit(
    const MechanismLaw& law, const DatabaseSpace& space,
    const std::vector<double>& record_prior, int target_record,
    const std::function<bool(const Release&)>& event, double epsilon_budget,
    double slack = 1e-9);

// The same band swept over every target record and a standard event family:
// each singleton outcome, each per-coordinate upper level set within the
// enumerated support, and the full support. `vacuous` reports that no slice
// ever offered two values to compare (the invariants pin every record given
// the rest), in which case passing is automatic.
struct PosteriorBandSummary {
  long long checks = 0;
  long long violations = 0;
  double max_abs_log_ratio = 0.0;
  double max_abs_deviation = 0.0;
  bool all_ok = true;
  bool vacuous = true;
};

PosteriorBandSummary AuditPosteriorBands(const MechanismLaw& law,
                                         const DatabaseSpace& space,
                                         const std::vector<double>& record_prior,
                                         double epsilon_budget,
                                         double slack = 1e-9);

// ---------------------------------------------------------------------------
// Monte Carlo diagnostics. These estimate, they never certify: a plug-in
// max-log-ratio can only undershoot budgets realized on outcomes the sample
// missed, and overshoots on thin bins are statistical noise.

struct McAuditOptions {
  double bin_width = 1.0;         // samples binned by floor(value / width)
  double smoothing = 0.5;         // additive smoothing per compared bin
  long long min_bin_count = 100;  // thinner bins are skipped, not guessed
};

struct McEpsilonEstimate {
  bool usable = false;  // at least one bin was thick enough on both sides
  double estimate = 0.0;
  long long bins_compared = 0;
  long long bins_skipped = 0;
};

// Plug-in estimate of the sup log-ratio between two sampled scalar releases
// binned on a common grid. Requires at least 100 samples on each side.
McEpsilonEstimate EstimateEpsilonFromSamples(
    const std::vector<double>& samples_x, const std::vector<double>& samples_y,
    const McAuditOptions& options = {});

// Draws `num_samples` scalar releases per space member (one substream per
// member, so results do not depend on pair order) and takes the worst
// pairwise estimate over members exactly k flips apart.
using ScalarSampler = std::function<double(const Database&, Rng&)>;

McEpsilonEstimate EmpiricalEpsilonMc(const ScalarSampler& sampler,
                                     const DatabaseSpace& space, int k,
                                     long long num_samples, const Rng& rng,
                                     const McAuditOptions& options = {});

}  // namespace invdp

#endif  // INVDP_AUDIT_H_
