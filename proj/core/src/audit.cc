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

#include "invdp/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

namespace invdp {
namespace {

constexpr long long kMaxEnumeration = 1000000;
constexpr double kInf = std::numeric_limits<double>::infinity();

// All laws evaluated over the same, explicitly indexed support. weight is 0
// where a law puts no mass; a stored nonpositive probability is treated the
// same way.
struct DenseLaws {
  std::vector<Release> outcomes;  // sorted
  std::vector<std::vector<double>> weight;
};

DenseLaws Densify(const MechanismLaw& law,
                  const std::vector<Database>& members) {
  if (!law) throw std::invalid_argument("audit: null mechanism law");
  std::set<Release> support;
  for (const auto& member : members) {
    for (const auto& [outcome, p] : law(member)) {
      if (p > 0.0) support.insert(outcome);
    }
  }
  DenseLaws dense;
  dense.outcomes.assign(support.begin(), support.end());
  dense.weight.resize(members.size());
  for (size_t m = 0; m < members.size(); ++m) {
    auto& row = dense.weight[m];
    row.assign(dense.outcomes.size(), 0.0);
    for (const auto& [outcome, p] : law(members[m])) {
      if (p <= 0.0) continue;
      const auto it = std::lower_bound(dense.outcomes.begin(),
                                       dense.outcomes.end(), outcome);
      row[it - dense.outcomes.begin()] = p;
    }
  }
  return dense;
}

void CheckDistance(int k) {
  if (k < 1) {
    throw std::invalid_argument("audit: neighbor distance must be >= 1");
  }
}

// Largest log P_x(E)/P_y(E) over upper level sets of the outcome ratio
// p_x(o)/p_y(o): the only sets that can extremize a ratio of sums. Outcomes
// where exactly one law puts mass make the sup infinite.
double MaxLevelSetLogRatio(const std::vector<double>& x,
                           const std::vector<double>& y) {
  std::vector<std::pair<double, size_t>> order;  // (log ratio, outcome)
  order.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const bool px = x[i] > 0.0;
    const bool py = y[i] > 0.0;
    if (px != py) return kInf;
    if (px) order.emplace_back(std::log(x[i]) - std::log(y[i]), i);
  }
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double mass_x = 0.0;
  double mass_y = 0.0;
  double worst = -kInf;
  for (const auto& [ratio, i] : order) {
    mass_x += x[i];
    mass_y += y[i];
    worst = std::max(worst, std::log(mass_x) - std::log(mass_y));
  }
  return worst;
}

}  // namespace

DatabaseSpace::DatabaseSpace(int num_records, int alphabet_size,
                             std::function<bool(const Database&)> member)
    : num_records_(num_records), alphabet_size_(alphabet_size) {
  if (num_records < 1) {
    throw std::invalid_argument("DatabaseSpace: need at least one record");
  }
  if (alphabet_size < 2) {
    throw std::invalid_argument(
        "DatabaseSpace: records need at least two possible values");
  }
  long long total = 1;
  for (int i = 0; i < num_records; ++i) {
    total *= alphabet_size;
    if (total > kMaxEnumeration) {
      throw std::invalid_argument(
          "DatabaseSpace: universe exceeds the enumeration cap of 1e6");
    }
  }
  Database x(num_records, 0);
  for (long long n = 0; n < total; ++n) {
    if (!member || member(x)) members_.push_back(x);
    for (int i = num_records - 1; i >= 0; --i) {
      if (++x[i] < alphabet_size) break;
      x[i] = 0;
    }
  }
}

int HammingDistance(const Database& x, const Database& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("HammingDistance: record counts differ");
  }
  int d = 0;
  for (size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
  return d;
}

std::string ToString(NeighborhoodClass c) {
  switch (c) {
    case NeighborhoodClass::kIntact:
      return "intact";
    case NeighborhoodClass::kSubstantiallyDisrupted:
      return "substantially_disrupted";
    case NeighborhoodClass::kDestroyed:
      return "destroyed";
  }
  return "unknown";
}

NeighborhoodReport ClassifyNeighborhood(const DatabaseSpace& space) {
  NeighborhoodReport report;
  const auto& members = space.members();
  if (members.size() < 2) return report;  // destroyed: nothing to compare
  int min_distance = std::numeric_limits<int>::max();
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = i + 1; j < members.size(); ++j) {
      min_distance = std::min(min_distance,
                              HammingDistance(members[i], members[j]));
      if (min_distance == 1) break;
    }
    if (min_distance == 1) break;
  }
  report.min_distance = min_distance;
  report.neighborhood_class = min_distance == 1
                                  ? NeighborhoodClass::kIntact
                                  : NeighborhoodClass::kSubstantiallyDisrupted;
  return report;
}

EmpiricalEpsilonResult EmpiricalEpsilon(const MechanismLaw& law,
                                        const DatabaseSpace& space, int k) {
  CheckDistance(k);
  const auto& members = space.members();
  const DenseLaws dense = Densify(law, members);

  EmpiricalEpsilonResult out;
  out.vacuous = true;
  double worst = 0.0;
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = i + 1; j < members.size(); ++j) {
      if (HammingDistance(members[i], members[j]) != k) continue;
      out.vacuous = false;
      const auto& x = dense.weight[i];
      const auto& y = dense.weight[j];
      for (size_t o = 0; o < x.size(); ++o) {
        const bool px = x[o] > 0.0;
        const bool py = y[o] > 0.0;
        if (px != py) out.finite = false;
        if (px && py) {
          worst = std::max(worst, std::abs(std::log(x[o] / y[o])));
        }
      }
    }
  }
  out.value = out.finite ? worst : kInf;
  if (out.vacuous) {
    out.finite = true;
    out.value = 0.0;
  }
  return out;
}

EmpiricalEpsilonResult MaxEventLogRatio(const MechanismLaw& law,
                                        const DatabaseSpace& space, int k) {
  CheckDistance(k);
  const auto& members = space.members();
  const DenseLaws dense = Densify(law, members);

  EmpiricalEpsilonResult out;
  out.vacuous = true;
  double worst = 0.0;
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = i + 1; j < members.size(); ++j) {
      if (HammingDistance(members[i], members[j]) != k) continue;
      out.vacuous = false;
      const double forward =
          MaxLevelSetLogRatio(dense.weight[i], dense.weight[j]);
      const double backward =
          MaxLevelSetLogRatio(dense.weight[j], dense.weight[i]);
      if (std::isinf(forward) || std::isinf(backward)) {
        out.finite = false;
      } else {
        worst = std::max({worst, forward, backward});
      }
    }
  }
  out.value = out.finite ? worst : kInf;
  if (out.vacuous) {
    out.finite = true;
    out.value = 0.0;
  }
  return out;
}

GammaStarResult ComputeGammaStar(
    const MechanismLaw& raw_law,
    const std::function<bool(const Release&)>& in_set,
    const DatabaseSpace& space, double base_epsilon, int k) {
  CheckDistance(k);
  if (!raw_law) throw std::invalid_argument("audit: null mechanism law");
  if (!in_set) throw std::invalid_argument("audit: null release set");
  if (!(base_epsilon > 0.0) || !std::isfinite(base_epsilon)) {
    throw std::invalid_argument("audit: base budget must be positive");
  }
  const auto& members = space.members();
  std::vector<double> mass(members.size(), 0.0);
  for (size_t m = 0; m < members.size(); ++m) {
    for (const auto& [outcome, p] : raw_law(members[m])) {
      if (p > 0.0 && in_set(outcome)) mass[m] += p;
    }
    if (!(mass[m] > 0.0)) {
      throw std::invalid_argument(
          "audit: a member has zero mass on the release set; "
          "conditioning is undefined");
    }
  }
  GammaStarResult out;
  out.vacuous = true;
  double worst = 0.0;
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = i + 1; j < members.size(); ++j) {
      if (HammingDistance(members[i], members[j]) != k) continue;
      out.vacuous = false;
      worst = std::max(worst, std::abs(std::log(mass[i] / mass[j])));
    }
  }
  out.value = out.vacuous ? 0.0 : worst / (k * base_epsilon);
  return out;
}

MechanismLaw ConditionMechanism(MechanismLaw raw_law,
                                std::function<bool(const Release&)> in_set) {
  if (!raw_law) throw std::invalid_argument("audit: null mechanism law");
  if (!in_set) throw std::invalid_argument("audit: null release set");
  return [raw = std::move(raw_law),
          set = std::move(in_set)](const Database& x) {
    ReleasePmf conditioned;
    double mass = 0.0;
    for (auto& [outcome, p] : raw(x)) {
      if (p > 0.0 && set(outcome)) {
        conditioned.emplace_hint(conditioned.end(), outcome, p);
        mass += p;
      }
    }
    if (!(mass > 0.0)) {
      throw std::invalid_argument(
          "audit: conditioning on a release set this database cannot reach");
    }
    for (auto& [outcome, p] : conditioned) p /= mass;
    return conditioned;
  };
}

namespace {

// Members sharing every record except `target`, keyed by the shared part.
// first: member index, second: the target record's value.
using Slices = std::map<Database, std::vector<std::pair<size_t, int>>>;

Slices SliceByRecord(const std::vector<Database>& members, int target) {
  Slices slices;
  for (size_t m = 0; m < members.size(); ++m) {
    Database rest = members[m];
    const int value = rest[target];
    rest[target] = -1;
    slices[std::move(rest)].emplace_back(m, value);
  }
  return slices;
}

std::vector<double> NormalizePrior(const std::vector<double>& record_prior,
                                   int alphabet_size) {
  if (static_cast<int>(record_prior.size()) != alphabet_size) {
    throw std::invalid_argument(
        "audit: prior needs one entry per alphabet value");
  }
  double total = 0.0;
  for (double p : record_prior) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("audit: prior entries must be positive");
    }
    total += p;
  }
  std::vector<double> prior = record_prior;
  for (double& p : prior) p /= total;
  return prior;
}

// One band evaluation inside a slice: posterior within exp(+-budget) of the
// slice-renormalized prior. likelihood[m] = P(event | member m).
void CheckSlice(const std::vector<std::pair<size_t, int>>& slice,
                const std::vector<double>& prior,
                const std::vector<double>& likelihood, double epsilon_budget,
                double slack, PosteriorCheckResult* out) {
  double denom_prior = 0.0;
  double denom_post = 0.0;
  for (const auto& [m, value] : slice) {
    denom_prior += prior[value];
    denom_post += prior[value] * likelihood[m];
  }
  if (!(denom_post > 0.0)) return;  // event unreachable from this slice
  ++out->slices;
  const double lo = std::exp(-epsilon_budget);
  const double hi = std::exp(epsilon_budget);
  for (const auto& [m, value] : slice) {
    const double p_prior = prior[value] / denom_prior;
    const double p_post = prior[value] * likelihood[m] / denom_post;
    ++out->checks;
    if (p_post < p_prior * lo - slack || p_post > p_prior * hi + slack) {
      ++out->violations;
    }
    const double deviation = std::abs(p_post - p_prior);
    if (deviation > out->max_abs_deviation) {
      out->max_abs_deviation = deviation;
    }
    const double log_ratio =
        p_post > 0.0 ? std::abs(std::log(p_post / p_prior)) : kInf;
    if (log_ratio > out->max_abs_log_ratio) {
      out->max_abs_log_ratio = log_ratio;
      out->worst_prior = p_prior;
      out->worst_posterior = p_post;
    }
  }
}

}  // namespace

PosteriorCheckResult PosteriorAudit(
    const MechanismLaw& law, const DatabaseSpace& space,
    const std::vector<double>& record_prior, int target_record,
    const std::function<bool(const Release&)>& event, double epsilon_budget,
    double slack) {
  if (!law) throw std::invalid_argument("audit: null mechanism law");
  if (!event) throw std::invalid_argument("audit: null release event");
  if (target_record < 0 || target_record >= space.num_records()) {
    throw std::invalid_argument("audit: target record out of range");
  }
  if (!(epsilon_budget >= 0.0) || !std::isfinite(epsilon_budget)) {
    throw std::invalid_argument("audit: budget must be nonnegative");
  }
  const std::vector<double> prior =
      NormalizePrior(record_prior, space.alphabet_size());
  const auto& members = space.members();

  std::vector<double> likelihood(members.size(), 0.0);
  for (size_t m = 0; m < members.size(); ++m) {
    for (const auto& [outcome, p] : law(members[m])) {
      if (p > 0.0 && event(outcome)) likelihood[m] += p;
    }
  }

  PosteriorCheckResult out;
  for (double l : likelihood) out.event_possible |= l > 0.0;
  if (!out.event_possible) return out;

  for (const auto& [rest, slice] : SliceByRecord(members, target_record)) {
    CheckSlice(slice, prior, likelihood, epsilon_budget, slack, &out);
  }
  out.bound_ok = out.violations == 0;
  return out;
}

PosteriorBandSummary AuditPosteriorBands(
    const MechanismLaw& law, const DatabaseSpace& space,
    const std::vector<double>& record_prior, double epsilon_budget,
    double slack) {
  if (!(epsilon_budget >= 0.0) || !std::isfinite(epsilon_budget)) {
    throw std::invalid_argument("audit: budget must be nonnegative");
  }
  const std::vector<double> prior =
      NormalizePrior(record_prior, space.alphabet_size());
  const auto& members = space.members();
  const DenseLaws dense = Densify(law, members);
  const size_t num_outcomes = dense.outcomes.size();
  const int num_coords =
      num_outcomes == 0 ? 0 : static_cast<int>(dense.outcomes[0].size());

  // Upper level sets per release coordinate: outcome indices ranked by the
  // coordinate, then per-member suffix masses. L(member, coord, t) is the
  // probability of {o : o[coord] >= t-th distinct value}.
  struct CoordinateSets {
    std::vector<std::vector<size_t>> groups;  // by ascending value
    std::vector<std::vector<double>> suffix;  // [member][group]
  };
  std::vector<CoordinateSets> coords(num_coords);
  for (int c = 0; c < num_coords; ++c) {
    std::map<int, std::vector<size_t>> by_value;
    for (size_t o = 0; o < num_outcomes; ++o) {
      by_value[dense.outcomes[o][c]].push_back(o);
    }
    auto& sets = coords[c];
    for (auto& [value, group] : by_value) {
      sets.groups.push_back(std::move(group));
    }
    sets.suffix.resize(members.size());
    for (size_t m = 0; m < members.size(); ++m) {
      auto& suffix = sets.suffix[m];
      suffix.assign(sets.groups.size(), 0.0);
      double acc = 0.0;
      for (size_t g = sets.groups.size(); g-- > 0;) {
        for (size_t o : sets.groups[g]) acc += dense.weight[m][o];
        suffix[g] = acc;
      }
    }
  }

  PosteriorBandSummary summary;
  PosteriorCheckResult scratch;
  std::vector<double> likelihood(members.size(), 0.0);
  for (int record = 0; record < space.num_records(); ++record) {
    const Slices slices = SliceByRecord(members, record);
    for (const auto& [rest, slice] : slices) {
      if (slice.size() > 1) summary.vacuous = false;
    }
    // Singleton events.
    for (size_t o = 0; o < num_outcomes; ++o) {
      for (size_t m = 0; m < members.size(); ++m) {
        likelihood[m] = dense.weight[m][o];
      }
      for (const auto& [rest, slice] : slices) {
        CheckSlice(slice, prior, likelihood, epsilon_budget, slack, &scratch);
      }
    }
    // Upper level sets (the loosest one doubles as the full support).
    for (int c = 0; c < num_coords; ++c) {
      for (size_t g = 0; g < coords[c].groups.size(); ++g) {
        for (size_t m = 0; m < members.size(); ++m) {
          likelihood[m] = coords[c].suffix[m][g];
        }
        for (const auto& [rest, slice] : slices) {
          CheckSlice(slice, prior, likelihood, epsilon_budget, slack,
                     &scratch);
        }
      }
    }
  }
  summary.checks = scratch.checks;
  summary.violations = scratch.violations;
  summary.max_abs_log_ratio = scratch.max_abs_log_ratio;
  summary.max_abs_deviation = scratch.max_abs_deviation;
  summary.all_ok = scratch.violations == 0;
  return summary;
}

McEpsilonEstimate EstimateEpsilonFromSamples(
    const std::vector<double>& samples_x, const std::vector<double>& samples_y,
    const McAuditOptions& options) {
  if (!(options.bin_width > 0.0) || !std::isfinite(options.bin_width)) {
    throw std::invalid_argument("audit: bin width must be positive");
  }
  if (options.smoothing < 0.0 || options.min_bin_count < 1) {
    throw std::invalid_argument("audit: bad smoothing or bin threshold");
  }
  McEpsilonEstimate out;
  if (samples_x.empty() || samples_y.empty()) return out;

  std::map<long long, std::pair<long long, long long>> bins;
  for (double v : samples_x) {
    if (!std::isfinite(v)) throw std::invalid_argument("audit: NaN sample");
    ++bins[static_cast<long long>(std::floor(v / options.bin_width))].first;
  }
  for (double v : samples_y) {
    if (!std::isfinite(v)) throw std::invalid_argument("audit: NaN sample");
    ++bins[static_cast<long long>(std::floor(v / options.bin_width))].second;
  }
  const double s = options.smoothing;
  const double nx = static_cast<double>(samples_x.size()) + s * bins.size();
  const double ny = static_cast<double>(samples_y.size()) + s * bins.size();
  for (const auto& [bin, counts] : bins) {
    if (counts.first < options.min_bin_count ||
        counts.second < options.min_bin_count) {
      ++out.bins_skipped;
      continue;
    }
    ++out.bins_compared;
    const double px = (counts.first + s) / nx;
    const double py = (counts.second + s) / ny;
    out.estimate = std::max(out.estimate, std::abs(std::log(px / py)));
  }
  out.usable = out.bins_compared > 0;
  return out;
}

McEpsilonEstimate EmpiricalEpsilonMc(const ScalarSampler& sampler,
                                     const DatabaseSpace& space, int k,
                                     long long num_samples, const Rng& rng,
                                     const McAuditOptions& options) {
  CheckDistance(k);
  if (!sampler) throw std::invalid_argument("audit: null sampler");
  if (num_samples < 100) {
    throw std::invalid_argument(
        "audit: refusing to estimate from fewer than 100 samples per member");
  }
  const auto& members = space.members();

  // Only members participating in some distance-k pair need samples.
  std::vector<std::pair<size_t, size_t>> pairs;
  std::vector<bool> needed(members.size(), false);
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = i + 1; j < members.size(); ++j) {
      if (HammingDistance(members[i], members[j]) != k) continue;
      pairs.emplace_back(i, j);
      needed[i] = needed[j] = true;
    }
  }
  McEpsilonEstimate best;
  if (pairs.empty()) return best;

  std::vector<std::vector<double>> samples(members.size());
  for (size_t m = 0; m < members.size(); ++m) {
    if (!needed[m]) continue;
    Rng stream = rng.Substream(m);
    samples[m].reserve(num_samples);
    for (long long t = 0; t < num_samples; ++t) {
      samples[m].push_back(sampler(members[m], stream));
    }
  }
  for (const auto& [i, j] : pairs) {
    const McEpsilonEstimate estimate =
        EstimateEpsilonFromSamples(samples[i], samples[j], options);
    if (!estimate.usable) continue;
    if (!best.usable || estimate.estimate > best.estimate) {
      const long long skipped = best.bins_skipped;
      best = estimate;
      best.bins_skipped += skipped;
    } else {
      best.bins_skipped += estimate.bins_skipped;
    }
  }
  return best;
}

}  // namespace invdp
