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
// Reproducible accuracy studies of invariant-constrained privatization.
// Two setups: a two-cell release with a pinned total, where every competing
// rule has a closed-form error law to compare against, and synthetic
// two-row frequency tables with published margins, where raw, projected and
// exactly-conditioned releases are raced at equal budgets.

#ifndef INVDP_EXPERIMENTS_H_
#define INVDP_EXPERIMENTS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "invdp/invariants.h"
#include "invdp/mechanisms.h"
#include "invdp/rng.h"
#include "invdp/sampler.h"

namespace invdp {

double L1Distance(const QueryVector& x, const QueryVector& y);
double L2Distance(const QueryVector& x, const QueryVector& y);

// Two cells, each privatized with Laplace noise at half the declared budget,
// total pinned. The rules compared on the first cell:
//  - conditional: the exact law of the release given the total, a single
//    Laplace draw at the full budget. Variance 2 / eps^2.
//  - symmetric: equal-weight projection onto the total, first cell picks up
//    (u1 - u2) / 2. Variance 4 / eps^2.
//  - weighted: beta * m1 + (1 - beta) * (total - m2) for each requested
//    beta. Variance (beta^2 + (1 - beta)^2) * 8 / eps^2.
struct TwoBinWeightedRow {
  double beta = 0.0;
  double mean_first = 0.0;
  double var_first = 0.0;
  double target_var = 0.0;
};

struct TwoBinStudy {
  long long replicates = 0;
  double epsilon = 0.0;
  double first_cell = 0.0;
  double second_cell = 0.0;
  double conditional_mean = 0.0;
  double conditional_var = 0.0;
  double conditional_target = 0.0;
  double symmetric_var = 0.0;
  double symmetric_target = 0.0;
  std::vector<TwoBinWeightedRow> weighted;
};

TwoBinStudy RunTwoBinStudy(double first_cell, double second_cell,
                           double epsilon, long long replicates,
                           const std::vector<double>& betas, Rng& rng);

// Synthetic frequency table with iid near-Poisson cells: each cell is the
// number of failures over 100 geometric trials at success probability 0.95
// (mean 5.26, variance 5.54). Labels are generic.
ContingencyTable SampleSyntheticTable(int rows, int cols, Rng& rng);

// Published-margin system for a demographic-style table: grand total, total
// of the first row, total over the adult columns (adult_start_col and up,
// 0-based, across all rows), plus nonnegativity of every cell. Cells are
// vectorized row-major.
LinearInvariantSystem MakeDemographicInvariants(const ContingencyTable& table,
                                                int adult_start_col);

// The four releases raced on each table. Raw and projected spend the full
// per-cell budget; conditional and raw-low spend the reduced one, so the
// interesting comparison is conditional against both raw baselines.
enum class TableMethod { kRaw, kProjected, kConditional, kRawLow };
inline constexpr int kNumTableMethods = 4;

std::string ToString(TableMethod method);

struct TableExperimentConfig {
  int num_tables = 20;
  int replicates = 100;  // releases per method per table
  long long nsim = 100000;
  double eps_raw = 1.0;          // per-cell budget: raw + projected
  double eps_constrained = 0.5;  // per-cell budget: conditional + raw-low
  std::optional<double> proposal_epsilon;  // chain proposal; default base
  int rows = 2;
  int cols = 23;
  int adult_start_col = 4;
};

struct TableReplicateRow {
  int table_id = 0;
  TableMethod method = TableMethod::kRaw;
  double epsilon = 0.0;  // per-cell budget the release spent
  int replicate = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  double acceptance_rate = 0.0;  // conditional rows only, 0 otherwise
};

struct TableExperimentResult {
  TableExperimentConfig config;
  uint64_t seed = 0;
  std::vector<TableReplicateRow> rows;
  // Per-table means over replicates, indexed by [table][method].
  std::vector<std::array<double, kNumTableMethods>> mean_l1;
  std::vector<std::array<double, kNumTableMethods>> mean_l2;
  // Whether every conditional release satisfied the invariants exactly.
  std::vector<bool> conditional_exact;
};

TableExperimentResult RunTableExperiment(const TableExperimentConfig& config,
                                         uint64_t seed);

// Acceptance rate of the conditional sampler as a function of the proposal
// budget, on one table's invariant system. Fresh chain per grid point.
struct ProposalSweepResult {
  std::vector<SweepPoint> points;
  double best_proposal = 0.0;
  double best_rate = 0.0;
};

ProposalSweepResult RunProposalSweep(const ContingencyTable& table,
                                     int adult_start_col, double base_epsilon,
                                     const std::vector<double>& grid,
                                     long long nsim, uint64_t seed);

}  // namespace invdp

#endif  // INVDP_EXPERIMENTS_H_
