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
// Ready-made audit scenarios: small binary-record spaces, counting queries
// privatized cell-by-cell with double-geometric noise, and invariants chosen
// so that each qualitative kind of guarantee damage is realized with
// closed-form expected audit values. A scenario is exact data for the audit
// functions, not a simulation: its law returns windowed pmfs whose off-window
// mass is bounded by tail_bound.

#ifndef INVDP_AUDIT_SCENARIOS_H_
#define INVDP_AUDIT_SCENARIOS_H_

#include <functional>
#include <string>
#include <vector>

#include "invdp/audit.h"

namespace invdp {

// Declarative description of a scenario. The released query is either the
// per-group record-value sums (`groups` nonempty: cell c sums the records
// with groups[i] == c) or the bucketed total ceil(sum / bucket_size) when
// `groups` is empty. The declared budget is split evenly across cells, and
// each cell gets independent double-geometric noise calibrated to the
// per-record sensitivity.
struct ScenarioConfig {
  enum class Invariant {
    kNone,             // X* is everything, release set is everything
    kTotalEquals,      // record sum pinned; release set: cell sum == value
    kTotalRange,       // record sum in [range_lo, range_hi]; release set:
                       // the exact query image of X*
    kFirstCellAtLeast  // first cell count >= value, also as release set
  };

  std::string name = "custom";
  int num_records = 0;
  int alphabet_size = 2;
  double epsilon = 1.0;
  std::vector<int> groups;  // empty: single bucketed-total cell
  int bucket_size = 1;
  Invariant invariant = Invariant::kNone;
  long long value = 0;
  long long range_lo = 0;
  long long range_hi = 0;
};

struct AuditScenario {
  ScenarioConfig config;
  int num_cells = 0;
  double per_cell_epsilon = 0.0;
  double tail_bound = 0.0;  // off-window release mass per database, bounded
  DatabaseSpace full_space;
  DatabaseSpace constrained_space;  // the invariant-consistent subset
  MechanismLaw raw_law;
  std::function<bool(const Release&)> in_set;  // invariant release set
};

AuditScenario BuildScenario(const ScenarioConfig& config);

// The stock scenarios, by the names the command line accepts:
//  - "trivial": four records, one released count, no invariant. The
//    conditional law is the raw law; attained budget epsilon, both
//    inflation factors zero, neighborhood intact.
//  - "secrecy-singleton": ten records, released bucket ceil(count/5), total
//    pinned to [6, 10]. Every consistent database shares one bucket, the
//    conditional release is constant: attained budget 0, empirical
//    inflation -1, yet the neighborhood is intact. A vacuous guarantee
//    without destroyed neighbors.
//  - "twobin": two groups of three records, per-group counts at budget
//    epsilon/2 each, grand total pinned to 3. Consistent databases differ
//    in two records or more: attained budget epsilon against distance-2
//    neighbors, empirical inflation -1/2, mass inflation 0.
//  - "threshold": four grouped records plus one, per-cell budget epsilon/2,
//    conditioned on the first released count clearing 3. Feasible masses
//    now depend on the data: mass inflation strictly positive, attained
//    budget epsilon/2 + log(1 + a - a^2) with a = exp(-epsilon/2).
AuditScenario BuildNamedScenario(const std::string& name, double epsilon);

const std::vector<std::string>& BuiltinScenarioNames();

// Parses the JSON form of ScenarioConfig: required "num_records" and
// "epsilon"; optional "name", "alphabet_size", "groups", "bucket_size" and
// "invariant" {"kind": "none" | "total_equals" | "total_range" |
// "first_cell_at_least", "value": int, "range": [lo, hi]}.
AuditScenario ScenarioFromJson(const std::string& json_text);

// One full audit pass: neighborhood classification, attained budgets of the
// raw law (distance 1, unconstrained space) and of the conditional law
// (min surviving distance, constrained space), both inflation factors, the
// inflated-budget bound, and exact posterior-band sweeps with a uniform
// record prior.
struct ScenarioAuditReport {
  std::string scenario;
  double epsilon = 0.0;
  double per_cell_epsilon = 0.0;
  double tail_bound = 0.0;
  NeighborhoodReport neighborhood;
  int audit_distance = 1;  // k: min surviving distance (1 when destroyed)
  EmpiricalEpsilonResult raw_attained;
  EmpiricalEpsilonResult conditional_attained;
  GammaStarResult gamma_star;
  // Smallest gamma with attained == (1 + gamma) k epsilon, when defined.
  bool empirical_gamma_defined = false;
  double empirical_gamma = 0.0;
  bool gamma_within_star = false;   // empirical gamma <= gamma* + slack
  bool inflated_bound_ok = false;   // attained <= (1 + gamma*) k eps + slack
  PosteriorBandSummary posterior_raw;          // band exp(+-epsilon)
  PosteriorBandSummary posterior_conditional;  // band exp(+-(1+gamma*) eps)
};

ScenarioAuditReport RunScenarioAudit(const AuditScenario& scenario,
                                     double slack = 1e-9);

}  // namespace invdp

#endif  // INVDP_AUDIT_SCENARIOS_H_
