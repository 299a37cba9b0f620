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

#include "invdp/experiments.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "invdp/postprocess.h"

namespace invdp {
namespace {

// Mean and variance accumulated in one pass. Magnitudes here are small
// counts, so the textbook formula is accurate enough.
struct Moments {
  long long n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void Add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  double Mean() const { return n == 0 ? 0.0 : sum / n; }
  double Variance() const {
    if (n < 2) return 0.0;
    const double mean = Mean();
    return (sum_sq - n * mean * mean) / (n - 1);
  }
};

constexpr int kSyntheticTrialsPerCell = 100;
constexpr double kSyntheticFailureProbability = 0.05;

}  // namespace

double L1Distance(const QueryVector& x, const QueryVector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("distance: dimension mismatch");
  }
  return (x - y).lpNorm<1>();
}

double L2Distance(const QueryVector& x, const QueryVector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("distance: dimension mismatch");
  }
  return (x - y).norm();
}

TwoBinStudy RunTwoBinStudy(double first_cell, double second_cell,
                           double epsilon, long long replicates,
                           const std::vector<double>& betas, Rng& rng) {
  if (replicates < 2) {
    throw std::invalid_argument("two-bin study: need at least two replicates");
  }
  const NoiseMechanism per_cell = NoiseMechanism::Laplace(epsilon, 2.0);
  const NoiseMechanism conditional = NoiseMechanism::Laplace(epsilon, 1.0);

  TwoBinStudy study;
  study.replicates = replicates;
  study.epsilon = epsilon;
  study.first_cell = first_cell;
  study.second_cell = second_cell;
  study.conditional_target = 2.0 / (epsilon * epsilon);
  study.symmetric_target = 4.0 / (epsilon * epsilon);

  const double total = first_cell + second_cell;
  Moments cond, sym;
  std::vector<Moments> weighted(betas.size());
  for (long long r = 0; r < replicates; ++r) {
    const double u1 = SampleLaplaceNoise(per_cell, rng);
    const double u2 = SampleLaplaceNoise(per_cell, rng);
    const double v = SampleLaplaceNoise(conditional, rng);
    cond.Add(first_cell + v);
    sym.Add(first_cell + 0.5 * (u1 - u2));
    const double m1 = first_cell + u1;
    const double m2 = second_cell + u2;
    for (size_t b = 0; b < betas.size(); ++b) {
      const double beta = betas[b];
      weighted[b].Add(beta * m1 + (1.0 - beta) * (total - m2));
    }
  }
  study.conditional_mean = cond.Mean();
  study.conditional_var = cond.Variance();
  study.symmetric_var = sym.Variance();
  for (size_t b = 0; b < betas.size(); ++b) {
    TwoBinWeightedRow row;
    row.beta = betas[b];
    row.mean_first = weighted[b].Mean();
    row.var_first = weighted[b].Variance();
    const double beta = betas[b];
    row.target_var = (beta * beta + (1.0 - beta) * (1.0 - beta)) * 8.0 /
                     (epsilon * epsilon);
    study.weighted.push_back(row);
  }
  return study;
}

ContingencyTable SampleSyntheticTable(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("synthetic table: empty shape");
  }
  ContingencyTable table;
  table.cells.resize(rows, cols);
  const double log_q = std::log(kSyntheticFailureProbability);
  for (int r = 0; r < rows; ++r) {
    table.row_labels.push_back("row_" + std::to_string(r + 1));
    for (int c = 0; c < cols; ++c) {
      long long cell = 0;
      for (int t = 0; t < kSyntheticTrialsPerCell; ++t) {
        cell += static_cast<long long>(
            std::floor(std::log(rng.NextUniform()) / log_q));
      }
      table.cells(r, c) = static_cast<double>(cell);
    }
  }
  for (int c = 0; c < cols; ++c) {
    table.column_labels.push_back("col_" + std::to_string(c + 1));
  }
  return table;
}

LinearInvariantSystem MakeDemographicInvariants(const ContingencyTable& table,
                                                int adult_start_col) {
  const int rows = table.rows();
  const int cols = table.cols();
  if (rows < 2) {
    throw std::invalid_argument(
        "demographic invariants: need a second row, the first-row margin "
        "would otherwise repeat the grand total");
  }
  if (adult_start_col < 1 || adult_start_col >= cols) {
    throw std::invalid_argument(
        "demographic invariants: adult columns must be a proper nonempty "
        "suffix");
  }
  const int d = rows * cols;
  Eigen::MatrixXd equality = Eigen::MatrixXd::Zero(3, d);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int j = r * cols + c;
      equality(0, j) = 1.0;
      if (r == 0) equality(1, j) = 1.0;
      if (c >= adult_start_col) equality(2, j) = 1.0;
    }
  }
  const Eigen::VectorXd rhs = equality * table.Vectorized();
  return LinearInvariantSystem::Create(equality, rhs,
                                       Eigen::MatrixXd::Identity(d, d),
                                       Eigen::VectorXd::Zero(d));
}

std::string ToString(TableMethod method) {
  switch (method) {
    case TableMethod::kRaw:
      return "raw";
    case TableMethod::kProjected:
      return "projected";
    case TableMethod::kConditional:
      return "conditional";
    case TableMethod::kRawLow:
      return "raw_low";
  }
  return "unknown";
}

TableExperimentResult RunTableExperiment(const TableExperimentConfig& config,
                                         uint64_t seed) {
  if (config.num_tables < 1 || config.replicates < 1 || config.nsim < 1) {
    throw std::invalid_argument("table experiment: empty design");
  }
  const NoiseMechanism raw_mech =
      NoiseMechanism::DoubleGeometric(config.eps_raw);
  const NoiseMechanism low_mech =
      NoiseMechanism::DoubleGeometric(config.eps_constrained);

  TableExperimentResult out;
  out.config = config;
  out.seed = seed;
  out.rows.reserve(static_cast<size_t>(config.num_tables) *
                   config.replicates * kNumTableMethods);
  const Rng master(seed);

  for (int t = 0; t < config.num_tables; ++t) {
    const Rng table_rng = master.Substream(t);
    Rng synth = table_rng.Substream(0);
    const ContingencyTable table =
        SampleSyntheticTable(config.rows, config.cols, synth);
    const QueryVector confidential = table.Vectorized();
    const LinearInvariantSystem system =
        MakeDemographicInvariants(table, config.adult_start_col);
    ConditionalReleaseSampler sampler(confidential, low_mech, system,
                                      std::nullopt, config.proposal_epsilon);

    std::array<double, kNumTableMethods> sum_l1{};
    std::array<double, kNumTableMethods> sum_l2{};
    bool exact = true;
    const auto push = [&](TableMethod method, double epsilon, int replicate,
                          const QueryVector& release, double acceptance) {
      TableReplicateRow row;
      row.table_id = t;
      row.method = method;
      row.epsilon = epsilon;
      row.replicate = replicate;
      row.l1 = L1Distance(release, confidential);
      row.l2 = L2Distance(release, confidential);
      row.acceptance_rate = acceptance;
      sum_l1[static_cast<int>(method)] += row.l1;
      sum_l2[static_cast<int>(method)] += row.l2;
      out.rows.push_back(row);
    };

    for (int rep = 0; rep < config.replicates; ++rep) {
      Rng raw_rng = table_rng.Substream(1).Substream(rep);
      const QueryVector raw_release =
          Privatize(confidential, raw_mech, raw_rng);
      push(TableMethod::kRaw, config.eps_raw, rep, raw_release, 0.0);

      const NonnegativeProjectionResult projected =
          NonnegativeL2Project(raw_release, system);
      push(TableMethod::kProjected, config.eps_raw, rep, projected.solution,
           0.0);

      Rng chain_rng = table_rng.Substream(2).Substream(rep);
      sampler.Reset();
      const QueryVector& conditional = sampler.Run(chain_rng, config.nsim);
      exact = exact && Satisfies(conditional, system);
      push(TableMethod::kConditional, config.eps_constrained, rep, conditional,
           sampler.diagnostics().acceptance_rate());

      Rng low_rng = table_rng.Substream(3).Substream(rep);
      const QueryVector low_release =
          Privatize(confidential, low_mech, low_rng);
      push(TableMethod::kRawLow, config.eps_constrained, rep, low_release,
           0.0);
    }

    std::array<double, kNumTableMethods> mean_l1{};
    std::array<double, kNumTableMethods> mean_l2{};
    for (int m = 0; m < kNumTableMethods; ++m) {
      mean_l1[m] = sum_l1[m] / config.replicates;
      mean_l2[m] = sum_l2[m] / config.replicates;
    }
    out.mean_l1.push_back(mean_l1);
    out.mean_l2.push_back(mean_l2);
    out.conditional_exact.push_back(exact);
  }
  return out;
}

ProposalSweepResult RunProposalSweep(const ContingencyTable& table,
                                     int adult_start_col, double base_epsilon,
                                     const std::vector<double>& grid,
                                     long long nsim, uint64_t seed) {
  if (grid.empty()) {
    throw std::invalid_argument("proposal sweep: empty grid");
  }
  const LinearInvariantSystem system =
      MakeDemographicInvariants(table, adult_start_col);
  ProposalSweepResult out;
  out.points = AcceptanceSweep(table.Vectorized(),
                               NoiseMechanism::DoubleGeometric(base_epsilon),
                               system, std::nullopt, grid, nsim, seed);
  for (const SweepPoint& point : out.points) {
    if (point.acceptance_rate > out.best_rate) {
      out.best_rate = point.acceptance_rate;
      out.best_proposal = point.proposal_epsilon;
    }
  }
  return out;
}

}  // namespace invdp
