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

#include "invdp/audit_scenarios.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "invdp/mechanisms.h"

namespace invdp {
namespace {

// Window half-width targets per-side tail mass below e^-31, so a whole
// release law is exact up to ~1e-13 even with a handful of cells.
constexpr double kTailLogTarget = 31.0;
constexpr long long kMaxWindowVolume = 4000000;

long long CeilDiv(long long a, long long b) { return (a + b - 1) / b; }

void ValidateConfig(const ScenarioConfig& config) {
  if (config.num_records < 1) {
    throw std::invalid_argument("scenario: need at least one record");
  }
  if (config.alphabet_size < 2) {
    throw std::invalid_argument("scenario: alphabet needs two values");
  }
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    throw std::invalid_argument("scenario: budget must be positive");
  }
  if (config.bucket_size < 1) {
    throw std::invalid_argument("scenario: bucket size must be >= 1");
  }
  if (!config.groups.empty()) {
    if (config.bucket_size != 1) {
      throw std::invalid_argument(
          "scenario: grouped cells and bucketing are mutually exclusive");
    }
    if (static_cast<int>(config.groups.size()) != config.num_records) {
      throw std::invalid_argument("scenario: one group index per record");
    }
    for (int g : config.groups) {
      if (g < 0) throw std::invalid_argument("scenario: negative group");
    }
  }
  if (config.invariant == ScenarioConfig::Invariant::kTotalRange &&
      config.range_lo > config.range_hi) {
    throw std::invalid_argument("scenario: empty total range");
  }
}

}  // namespace

AuditScenario BuildScenario(const ScenarioConfig& config) {
  ValidateConfig(config);
  const int unit = config.alphabet_size - 1;  // per-record sum sensitivity

  int num_cells = 1;
  for (int g : config.groups) num_cells = std::max(num_cells, g + 1);

  // Released query and the largest value each cell can take.
  std::vector<long long> cell_max(num_cells, 0);
  if (config.groups.empty()) {
    cell_max[0] = CeilDiv(static_cast<long long>(config.num_records) * unit,
                          config.bucket_size);
  } else {
    for (int g : config.groups) cell_max[g] += unit;
  }
  const auto query = [groups = config.groups, num_cells,
                      bucket = config.bucket_size](const Database& x) {
    Release q(num_cells, 0);
    if (groups.empty()) {
      long long total = std::accumulate(x.begin(), x.end(), 0LL);
      q[0] = static_cast<int>(CeilDiv(total, bucket));
    } else {
      for (size_t i = 0; i < x.size(); ++i) q[groups[i]] += x[i];
    }
    return q;
  };

  const double per_cell_epsilon = config.epsilon / num_cells;
  const NoiseMechanism mechanism =
      NoiseMechanism::DoubleGeometric(per_cell_epsilon, unit);
  const double decay = mechanism.decay();
  const int half_width = std::max(
      30, static_cast<int>(std::ceil(kTailLogTarget / -std::log(decay))));

  long long volume = 1;
  std::vector<int> window_lo(num_cells), window_hi(num_cells);
  for (int c = 0; c < num_cells; ++c) {
    window_lo[c] = -half_width;
    window_hi[c] = static_cast<int>(cell_max[c]) + half_width;
    volume *= window_hi[c] - window_lo[c] + 1;
    if (volume > kMaxWindowVolume) {
      throw std::invalid_argument(
          "scenario: release window too large to enumerate exactly");
    }
  }
  const double per_side_tail =
      std::pow(decay, half_width + 1) / (1.0 + decay);
  const double tail_bound = num_cells * 2.0 * per_side_tail;

  // Consistency predicate over records.
  std::function<bool(const Database&)> consistent;
  switch (config.invariant) {
    case ScenarioConfig::Invariant::kNone:
      break;
    case ScenarioConfig::Invariant::kTotalEquals:
      consistent = [v = config.value](const Database& x) {
        return std::accumulate(x.begin(), x.end(), 0LL) == v;
      };
      break;
    case ScenarioConfig::Invariant::kTotalRange:
      consistent = [lo = config.range_lo, hi = config.range_hi](
                       const Database& x) {
        const long long total = std::accumulate(x.begin(), x.end(), 0LL);
        return total >= lo && total <= hi;
      };
      break;
    case ScenarioConfig::Invariant::kFirstCellAtLeast:
      consistent = [query, v = config.value](const Database& x) {
        return query(x)[0] >= v;
      };
      break;
  }

  DatabaseSpace full_space(config.num_records, config.alphabet_size);
  DatabaseSpace constrained_space(config.num_records, config.alphabet_size,
                                  consistent);
  if (constrained_space.members().empty()) {
    throw std::invalid_argument(
        "scenario: the invariants rule out every database");
  }

  // Release set matching the invariant.
  std::function<bool(const Release&)> in_set;
  switch (config.invariant) {
    case ScenarioConfig::Invariant::kNone:
      in_set = [](const Release&) { return true; };
      break;
    case ScenarioConfig::Invariant::kTotalEquals:
      if (config.groups.empty()) {
        in_set = [v = CeilDiv(config.value, config.bucket_size)](
                     const Release& m) { return m[0] == v; };
      } else {
        in_set = [v = config.value](const Release& m) {
          return std::accumulate(m.begin(), m.end(), 0LL) == v;
        };
      }
      break;
    case ScenarioConfig::Invariant::kTotalRange: {
      auto image = std::make_shared<std::set<Release>>();
      for (const auto& member : constrained_space.members()) {
        image->insert(query(member));
      }
      in_set = [image](const Release& m) { return image->count(m) > 0; };
      break;
    }
    case ScenarioConfig::Invariant::kFirstCellAtLeast:
      in_set = [v = config.value](const Release& m) { return m[0] >= v; };
      break;
  }

  MechanismLaw raw_law = [query, window_lo, window_hi, decay,
                          num_cells](const Database& x) {
    const Release q = query(x);
    std::vector<std::vector<double>> cell_pmf(num_cells);
    for (int c = 0; c < num_cells; ++c) {
      cell_pmf[c].reserve(window_hi[c] - window_lo[c] + 1);
      for (int t = window_lo[c]; t <= window_hi[c]; ++t) {
        cell_pmf[c].push_back(DoubleGeometricPmf(t - q[c], decay));
      }
    }
    ReleasePmf law;
    Release outcome(num_cells);
    std::vector<int> index(num_cells, 0);
    while (true) {
      double p = 1.0;
      for (int c = 0; c < num_cells; ++c) {
        outcome[c] = window_lo[c] + index[c];
        p *= cell_pmf[c][index[c]];
      }
      law.emplace_hint(law.end(), outcome, p);
      int c = num_cells - 1;
      for (; c >= 0; --c) {
        if (window_lo[c] + ++index[c] <= window_hi[c]) break;
        index[c] = 0;
      }
      if (c < 0) break;
    }
    return law;
  };

  return AuditScenario{
      .config = config,
      .num_cells = num_cells,
      .per_cell_epsilon = per_cell_epsilon,
      .tail_bound = tail_bound,
      .full_space = std::move(full_space),
      .constrained_space = std::move(constrained_space),
      .raw_law = std::move(raw_law),
      .in_set = std::move(in_set),
  };
}

const std::vector<std::string>& BuiltinScenarioNames() {
  static const std::vector<std::string> kNames = {
      "trivial", "secrecy-singleton", "twobin", "threshold"};
  return kNames;
}

AuditScenario BuildNamedScenario(const std::string& name, double epsilon) {
  ScenarioConfig config;
  config.name = name;
  config.epsilon = epsilon;
  if (name == "trivial") {
    config.num_records = 4;
  } else if (name == "secrecy-singleton") {
    config.num_records = 10;
    config.bucket_size = 5;
    config.invariant = ScenarioConfig::Invariant::kTotalRange;
    config.range_lo = 6;
    config.range_hi = 10;
  } else if (name == "twobin") {
    config.num_records = 6;
    config.groups = {0, 0, 0, 1, 1, 1};
    config.invariant = ScenarioConfig::Invariant::kTotalEquals;
    config.value = 3;
  } else if (name == "threshold") {
    config.num_records = 5;
    config.groups = {0, 0, 0, 0, 1};
    config.invariant = ScenarioConfig::Invariant::kFirstCellAtLeast;
    config.value = 3;
  } else {
    std::string known;
    for (const auto& n : BuiltinScenarioNames()) known += " " + n;
    throw std::invalid_argument("unknown scenario '" + name + "'; expected" +
                                known);
  }
  return BuildScenario(config);
}

AuditScenario ScenarioFromJson(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scenario json: ") + e.what());
  }
  ScenarioConfig config;
  try {
    config.name = j.value("name", std::string("custom"));
    config.num_records = j.at("num_records").get<int>();
    config.alphabet_size = j.value("alphabet_size", 2);
    config.epsilon = j.at("epsilon").get<double>();
    config.groups = j.value("groups", std::vector<int>{});
    config.bucket_size = j.value("bucket_size", 1);
    if (j.contains("invariant")) {
      const auto& inv = j.at("invariant");
      const std::string kind = inv.at("kind").get<std::string>();
      if (kind == "none") {
        config.invariant = ScenarioConfig::Invariant::kNone;
      } else if (kind == "total_equals") {
        config.invariant = ScenarioConfig::Invariant::kTotalEquals;
        config.value = inv.at("value").get<long long>();
      } else if (kind == "total_range") {
        config.invariant = ScenarioConfig::Invariant::kTotalRange;
        const auto& range = inv.at("range");
        config.range_lo = range.at(0).get<long long>();
        config.range_hi = range.at(1).get<long long>();
      } else if (kind == "first_cell_at_least") {
        config.invariant = ScenarioConfig::Invariant::kFirstCellAtLeast;
        config.value = inv.at("value").get<long long>();
      } else {
        throw std::invalid_argument("scenario json: unknown invariant kind '" +
                                    kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scenario json: ") + e.what());
  }
  return BuildScenario(config);
}

ScenarioAuditReport RunScenarioAudit(const AuditScenario& scenario,
                                     double slack) {
  ScenarioAuditReport report;
  report.scenario = scenario.config.name;
  report.epsilon = scenario.config.epsilon;
  report.per_cell_epsilon = scenario.per_cell_epsilon;
  report.tail_bound = scenario.tail_bound;

  report.neighborhood = ClassifyNeighborhood(scenario.constrained_space);
  const int k = std::max(1, report.neighborhood.min_distance);
  report.audit_distance = k;

  report.raw_attained =
      EmpiricalEpsilon(scenario.raw_law, scenario.full_space, 1);
  const MechanismLaw conditional =
      ConditionMechanism(scenario.raw_law, scenario.in_set);
  report.conditional_attained =
      EmpiricalEpsilon(conditional, scenario.constrained_space, k);
  report.gamma_star =
      ComputeGammaStar(scenario.raw_law, scenario.in_set,
                       scenario.constrained_space, scenario.config.epsilon, k);

  if (report.conditional_attained.vacuous) {
    report.gamma_within_star = true;
    report.inflated_bound_ok = true;
  } else if (report.conditional_attained.finite) {
    report.empirical_gamma_defined = true;
    report.empirical_gamma =
        report.conditional_attained.value / (k * scenario.config.epsilon) -
        1.0;
    report.gamma_within_star =
        report.empirical_gamma <= report.gamma_star.value + slack;
    report.inflated_bound_ok =
        report.conditional_attained.value <=
        (1.0 + report.gamma_star.value) * k * scenario.config.epsilon + slack;
  }

  const std::vector<double> prior(scenario.config.alphabet_size,
                                  1.0 / scenario.config.alphabet_size);
  report.posterior_raw =
      AuditPosteriorBands(scenario.raw_law, scenario.full_space, prior,
                          scenario.config.epsilon, slack);
  report.posterior_conditional = AuditPosteriorBands(
      conditional, scenario.constrained_space, prior,
      (1.0 + std::max(0.0, report.gamma_star.value)) * scenario.config.epsilon,
      slack);
  return report;
}

}  // namespace invdp
