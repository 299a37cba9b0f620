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
// Command line front end. Subcommands:
//   sample      draw an unconstrained privatized release of a count table
//   condition   run the invariant-respecting chain and emit one release
//   project     post-process a noisy release onto the invariant set
//   audit       exact small-space privacy audit of a named or custom scenario
//   experiment  twobin | table | sweep studies
//
// All outputs are plain JSON and CSV, derived only from the flags and the
// seed, so identical invocations produce byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "invdp/audit.h"
#include "invdp/audit_scenarios.h"
#include "invdp/experiments.h"
#include "invdp/invariants.h"
#include "invdp/mechanisms.h"
#include "invdp/postprocess.h"
#include "invdp/rng.h"
#include "invdp/sampler.h"
#include "invdp/version.h"
#include "json.hpp"

namespace {

using invdp::ContingencyTable;
using invdp::LinearInvariantSystem;
using invdp::NoiseMechanism;
using invdp::ProposalIndexSet;
using invdp::QueryVector;
using invdp::Rng;
using nlohmann::json;

constexpr uint64_t kSweepTableStream = 0x1000000000ull;

std::string FormatDouble(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// JSON cannot carry infinities; report them as null next to a finite flag.
json JsonDouble(double v) {
  if (std::isfinite(v)) return json(v);
  return json(nullptr);
}

void WriteTextFile(const std::filesystem::path& path,
                   const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << content;
}

void WriteReport(const std::filesystem::path& out_dir, const std::string& name,
                 const json& report) {
  WriteTextFile(out_dir / name, report.dump(2) + "\n");
  std::cout << "wrote " << (out_dir / name).string() << "\n";
}

json BaseReport(const std::string& command) {
  json report;
  report["version"] = invdp::kVersion;
  report["command"] = command;
  return report;
}

std::filesystem::path EnsureOutDir(const std::string& out) {
  std::filesystem::path dir = out.empty() ? "." : out;
  std::filesystem::create_directories(dir);
  return dir;
}

// Mirrors the CSV table format accepted by LoadTableCsv: a '#' preamble,
// a header of column labels, one labelled row per table row.
std::string TableCsv(const ContingencyTable& table,
                     const std::vector<std::string>& preamble) {
  std::ostringstream os;
  for (const std::string& line : preamble) os << "# " << line << "\n";
  const bool row_labels = !table.row_labels.empty();
  if (row_labels) os << "group";
  for (int j = 0; j < table.cols(); ++j) {
    if (row_labels || j > 0) os << ",";
    os << table.column_labels[static_cast<size_t>(j)];
  }
  os << "\n";
  for (int i = 0; i < table.rows(); ++i) {
    if (row_labels) os << table.row_labels[static_cast<size_t>(i)];
    for (int j = 0; j < table.cols(); ++j) {
      if (row_labels || j > 0) os << ",";
      os << FormatDouble(table.cells(i, j));
    }
    os << "\n";
  }
  return os.str();
}

ContingencyTable WithCells(const ContingencyTable& like,
                           const QueryVector& values) {
  ContingencyTable out = like;
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) {
      out.cells(i, j) = values[i * out.cols() + j];
    }
  }
  return out;
}

json VectorJson(const QueryVector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

NoiseMechanism MakeMechanism(const std::string& kind, double epsilon,
                             double sensitivity) {
  if (kind == "dg") return NoiseMechanism::DoubleGeometric(epsilon, sensitivity);
  if (kind == "laplace") return NoiseMechanism::Laplace(epsilon, sensitivity);
  throw CLI::ValidationError("--mechanism", "expected dg or laplace");
}

// Loads either the user-provided system or, for demographic-style tables,
// the default published margins (grand total, first-row total, adult total).
invdp::InvariantSpec ResolveInvariants(const std::string& invariants_path,
                                       const ContingencyTable& table,
                                       int adult_start_col) {
  if (!invariants_path.empty()) {
    return invdp::LoadInvariantSystemJson(invariants_path);
  }
  return invdp::InvariantSpec{
      invdp::MakeDemographicInvariants(table, adult_start_col), std::nullopt};
}

json PosteriorSummaryJson(const invdp::PosteriorBandSummary& s) {
  json out;
  out["checks"] = s.checks;
  out["violations"] = s.violations;
  out["max_abs_log_ratio"] = s.max_abs_log_ratio;
  out["max_abs_deviation"] = s.max_abs_deviation;
  out["all_ok"] = s.all_ok;
  out["vacuous"] = s.vacuous;
  return out;
}

json AttainedJson(const invdp::EmpiricalEpsilonResult& r) {
  json out;
  out["vacuous"] = r.vacuous;
  out["finite"] = r.finite;
  out["value"] = r.finite ? JsonDouble(r.value) : json(nullptr);
  return out;
}

json ScenarioReportJson(const invdp::ScenarioAuditReport& r) {
  json out;
  out["scenario"] = r.scenario;
  out["epsilon"] = r.epsilon;
  out["per_cell_epsilon"] = r.per_cell_epsilon;
  out["tail_bound"] = r.tail_bound;
  out["neighborhood_class"] = invdp::ToString(r.neighborhood.neighborhood_class);
  out["min_surviving_distance"] = r.neighborhood.min_distance;
  out["audit_distance"] = r.audit_distance;
  out["raw_attained"] = AttainedJson(r.raw_attained);
  out["conditional_attained"] = AttainedJson(r.conditional_attained);
  out["gamma_star"] = json{{"vacuous", r.gamma_star.vacuous},
                           {"value", JsonDouble(r.gamma_star.value)}};
  out["empirical_gamma_defined"] = r.empirical_gamma_defined;
  out["empirical_gamma"] =
      r.empirical_gamma_defined ? JsonDouble(r.empirical_gamma) : json(nullptr);
  out["gamma_within_star"] = r.gamma_within_star;
  out["inflated_bound_ok"] = r.inflated_bound_ok;
  out["posterior_raw"] = PosteriorSummaryJson(r.posterior_raw);
  out["posterior_conditional"] = PosteriorSummaryJson(r.posterior_conditional);
  return out;
}

// --- sample -----------------------------------------------------------------

struct SampleArgs {
  std::string table_path;
  std::string mechanism = "dg";
  double eps = 1.0;
  double sensitivity = 1.0;
  uint64_t seed = 0;
  std::string out;
};

int RunSample(const SampleArgs& args) {
  const ContingencyTable table = invdp::LoadTableCsv(args.table_path);
  const QueryVector confidential = table.Vectorized();
  const NoiseMechanism mech =
      MakeMechanism(args.mechanism, args.eps, args.sensitivity);
  Rng rng(args.seed);
  const QueryVector release = invdp::Privatize(confidential, mech, rng);

  const auto out_dir = EnsureOutDir(args.out);
  json report = BaseReport("sample");
  report["config"] = {{"table", args.table_path},
                      {"mechanism", args.mechanism},
                      {"eps", args.eps},
                      {"sensitivity", args.sensitivity},
                      {"seed", args.seed}};
  report["cells"] = table.rows() * table.cols();
  report["release"] = VectorJson(release);
  WriteReport(out_dir, "sample_report.json", report);
  WriteTextFile(out_dir / "sample_release.csv",
                TableCsv(WithCells(table, release),
                         {std::string(invdp::kVersion) + " sample",
                          "eps=" + FormatDouble(args.eps),
                          "seed=" + std::to_string(args.seed)}));
  std::cout << "wrote " << (out_dir / "sample_release.csv").string() << "\n";
  return 0;
}

// --- condition --------------------------------------------------------------

struct ConditionArgs {
  std::string table_path;
  std::string invariants_path;
  int adult_start_col = 4;
  double eps = 1.0;
  std::optional<double> eps_proposal;
  long long nsim = 100000;
  std::optional<long long> burn_in;
  double sensitivity = 1.0;
  uint64_t seed = 0;
  std::string out;
};

int RunCondition(const ConditionArgs& args) {
  const ContingencyTable table = invdp::LoadTableCsv(args.table_path);
  const QueryVector confidential = table.Vectorized();
  const invdp::InvariantSpec spec =
      ResolveInvariants(args.invariants_path, table, args.adult_start_col);
  const NoiseMechanism base =
      NoiseMechanism::DoubleGeometric(args.eps, args.sensitivity);
  invdp::ConditionalReleaseSampler sampler(confidential, base, spec.system,
                                           spec.index_set, args.eps_proposal);

  // Trace the lowest proposed and lowest completed coordinates; on the
  // default margin system those are table cells 2 and 1 (1-based).
  const std::vector<int> completed =
      sampler.index_set().Complement(sampler.dimension());
  std::vector<int> proposed = sampler.index_set().indices();
  std::sort(proposed.begin(), proposed.end());
  const int trace_in = proposed.empty() ? 0 : proposed.front();
  const int trace_out = completed.empty() ? 0 : completed.front();

  const long long burn_in = args.burn_in.value_or(args.nsim / 10);
  Rng rng(args.seed);
  std::ostringstream trace;
  trace << "# " << invdp::kVersion << " condition trace\n";
  trace << "# seed=" << args.seed << " eps=" << FormatDouble(args.eps)
        << " nsim=" << args.nsim << " burn_in=" << burn_in << "\n";
  trace << "iteration,cell_" << trace_in + 1 << ",cell_" << trace_out + 1
        << ",accepted\n";
  for (long long it = 1; it <= args.nsim; ++it) {
    const bool accepted = sampler.Step(rng);
    trace << it << "," << FormatDouble(sampler.state()[trace_in]) << ","
          << FormatDouble(sampler.state()[trace_out]) << ","
          << (accepted ? 1 : 0) << "\n";
  }
  const QueryVector release = sampler.state();
  const bool exact = invdp::Satisfies(release, spec.system);

  const auto out_dir = EnsureOutDir(args.out);
  json report = BaseReport("condition");
  report["config"] = {{"table", args.table_path},
                      {"invariants", args.invariants_path},
                      {"eps", args.eps},
                      {"eps_proposal", args.eps_proposal.has_value()
                                           ? json(*args.eps_proposal)
                                           : json(nullptr)},
                      {"nsim", args.nsim},
                      {"burn_in", burn_in},
                      {"sensitivity", args.sensitivity},
                      {"seed", args.seed}};
  report["index_set"] = json(proposed);
  report["acceptance_rate"] = sampler.diagnostics().acceptance_rate();
  report["accepted"] = sampler.diagnostics().accepted;
  report["invariants_satisfied"] = exact;
  report["release"] = VectorJson(release);
  WriteReport(out_dir, "condition_report.json", report);
  WriteTextFile(out_dir / "condition_trace.csv", trace.str());
  std::cout << "wrote " << (out_dir / "condition_trace.csv").string() << "\n";
  WriteTextFile(out_dir / "condition_release.csv",
                TableCsv(WithCells(table, release),
                         {std::string(invdp::kVersion) + " condition",
                          "eps=" + FormatDouble(args.eps),
                          "seed=" + std::to_string(args.seed)}));
  std::cout << "wrote " << (out_dir / "condition_release.csv").string()
            << "\n";
  return 0;
}

// --- project ----------------------------------------------------------------

struct ProjectArgs {
  std::string table_path;
  std::string invariants_path;
  std::string out;
};

int RunProject(const ProjectArgs& args) {
  const ContingencyTable table = invdp::LoadTableCsv(args.table_path);
  const invdp::InvariantSpec spec =
      invdp::LoadInvariantSystemJson(args.invariants_path);
  const QueryVector noisy = table.Vectorized();

  json report = BaseReport("project");
  report["config"] = {{"table", args.table_path},
                      {"invariants", args.invariants_path}};
  QueryVector solution;
  if (spec.system.has_inequalities()) {
    const invdp::NonnegativeProjectionResult result =
        invdp::NonnegativeL2Project(noisy, spec.system);
    solution = result.solution;
    report["kkt_residual"] = result.kkt_residual;
    report["iterations"] = result.iterations;
    report["converged"] = result.converged;
  } else {
    solution = invdp::L2ProjectEquality(noisy, spec.system);
    report["converged"] = true;
  }
  report["invariants_satisfied"] = invdp::Satisfies(solution, spec.system,
                                                    1e-6);
  report["release"] = VectorJson(solution);

  const auto out_dir = EnsureOutDir(args.out);
  WriteReport(out_dir, "project_report.json", report);
  WriteTextFile(out_dir / "project_release.csv",
                TableCsv(WithCells(table, solution),
                         {std::string(invdp::kVersion) + " project"}));
  std::cout << "wrote " << (out_dir / "project_release.csv").string() << "\n";
  return 0;
}

// --- audit ------------------------------------------------------------------

struct AuditArgs {
  std::string scenario = "trivial";
  std::string scenario_json_path;
  double eps = 1.0;
  std::string out;
};

int RunAudit(const AuditArgs& args) {
  invdp::AuditScenario scenario =
      args.scenario_json_path.empty()
          ? invdp::BuildNamedScenario(args.scenario, args.eps)
          : [&] {
              std::ifstream in(args.scenario_json_path);
              if (!in) {
                throw std::runtime_error("cannot read scenario json: " +
                                         args.scenario_json_path);
              }
              std::stringstream buffer;
              buffer << in.rdbuf();
              return invdp::ScenarioFromJson(buffer.str());
            }();
  const invdp::ScenarioAuditReport audit = invdp::RunScenarioAudit(scenario);

  json report = BaseReport("audit");
  report["config"] = {{"scenario", args.scenario},
                      {"scenario_json", args.scenario_json_path},
                      {"eps", args.eps}};
  report["report"] = ScenarioReportJson(audit);
  const auto out_dir = EnsureOutDir(args.out);
  WriteReport(out_dir, "audit_report.json", report);

  const auto& r = audit;
  std::cout << "scenario " << r.scenario << ": class="
            << invdp::ToString(r.neighborhood.neighborhood_class)
            << " k=" << r.audit_distance << " raw_attained="
            << (r.raw_attained.finite ? FormatDouble(r.raw_attained.value)
                                      : "inf")
            << " gamma_star=" << FormatDouble(r.gamma_star.value) << "\n";
  return 0;
}

// --- experiment twobin -------------------------------------------------------

struct TwoBinArgs {
  double s1 = 3.0;
  double s2 = 3.0;
  double eps = 1.0;
  long long replicates = 100000;
  std::vector<double> betas = {0.0, 0.25, 0.5, 0.75, 1.0};
  uint64_t seed = 0;
  std::string out;
};

int RunTwoBin(const TwoBinArgs& args) {
  Rng rng(args.seed);
  const invdp::TwoBinStudy study = invdp::RunTwoBinStudy(
      args.s1, args.s2, args.eps, args.replicates, args.betas, rng);

  json report = BaseReport("experiment twobin");
  report["config"] = {{"s1", args.s1},         {"s2", args.s2},
                      {"eps", args.eps},       {"replicates", args.replicates},
                      {"betas", args.betas},   {"seed", args.seed}};
  report["conditional"] = {{"mean", study.conditional_mean},
                           {"var", study.conditional_var},
                           {"target_var", study.conditional_target}};
  report["symmetric"] = {{"var", study.symmetric_var},
                         {"target_var", study.symmetric_target}};
  json rows = json::array();
  std::ostringstream csv;
  csv << "# " << invdp::kVersion << " twobin seed=" << args.seed << "\n";
  csv << "beta,mean_first,var_first,target_var\n";
  for (const auto& row : study.weighted) {
    rows.push_back({{"beta", row.beta},
                    {"mean_first", row.mean_first},
                    {"var_first", row.var_first},
                    {"target_var", row.target_var}});
    csv << FormatDouble(row.beta) << "," << FormatDouble(row.mean_first) << ","
        << FormatDouble(row.var_first) << "," << FormatDouble(row.target_var)
        << "\n";
  }
  report["weighted"] = rows;

  const auto out_dir = EnsureOutDir(args.out);
  WriteReport(out_dir, "twobin_report.json", report);
  WriteTextFile(out_dir / "twobin_rows.csv", csv.str());
  std::cout << "wrote " << (out_dir / "twobin_rows.csv").string() << "\n";
  return 0;
}

// --- experiment table ---------------------------------------------------------

struct TableArgs {
  invdp::TableExperimentConfig config;
  double eps_proposal = 0.0;  // 0 means: use the constrained base budget
  uint64_t seed = 0;
  std::string out;
};

int RunTableStudy(const TableArgs& args) {
  invdp::TableExperimentConfig config = args.config;
  if (args.eps_proposal > 0.0) config.proposal_epsilon = args.eps_proposal;
  const invdp::TableExperimentResult result =
      invdp::RunTableExperiment(config, args.seed);

  std::ostringstream csv;
  csv << "# " << invdp::kVersion << " table experiment seed=" << args.seed
      << "\n";
  csv << "table_id,method,epsilon,replicate,l1,l2,acceptance_rate\n";
  for (const auto& row : result.rows) {
    csv << row.table_id << "," << invdp::ToString(row.method) << ","
        << FormatDouble(row.epsilon) << "," << row.replicate << ","
        << FormatDouble(row.l1) << "," << FormatDouble(row.l2) << ","
        << FormatDouble(row.acceptance_rate) << "\n";
  }

  std::ostringstream summary;
  summary << "# " << invdp::kVersion << " per-table means seed=" << args.seed
          << "\n";
  summary << "table_id,method,mean_l1,mean_l2\n";
  json tables = json::array();
  for (int t = 0; t < config.num_tables; ++t) {
    json entry;
    entry["table_id"] = t;
    for (int m = 0; m < invdp::kNumTableMethods; ++m) {
      const auto method = static_cast<invdp::TableMethod>(m);
      summary << t << "," << invdp::ToString(method) << ","
              << FormatDouble(result.mean_l1[t][m]) << ","
              << FormatDouble(result.mean_l2[t][m]) << "\n";
      entry[std::string("mean_l1_") + invdp::ToString(method)] =
          result.mean_l1[t][m];
      entry[std::string("mean_l2_") + invdp::ToString(method)] =
          result.mean_l2[t][m];
    }
    entry["conditional_exact"] = static_cast<bool>(result.conditional_exact[t]);
    tables.push_back(entry);
  }

  json report = BaseReport("experiment table");
  report["config"] = {{"num_tables", config.num_tables},
                      {"replicates", config.replicates},
                      {"nsim", config.nsim},
                      {"eps_raw", config.eps_raw},
                      {"eps_constrained", config.eps_constrained},
                      {"eps_proposal", config.proposal_epsilon.has_value()
                                           ? json(*config.proposal_epsilon)
                                           : json(nullptr)},
                      {"rows", config.rows},
                      {"cols", config.cols},
                      {"adult_start_col", config.adult_start_col},
                      {"seed", args.seed}};
  report["tables"] = tables;

  const auto out_dir = EnsureOutDir(args.out);
  WriteReport(out_dir, "table_report.json", report);
  WriteTextFile(out_dir / "table_replicates.csv", csv.str());
  std::cout << "wrote " << (out_dir / "table_replicates.csv").string() << "\n";
  WriteTextFile(out_dir / "table_summary.csv", summary.str());
  std::cout << "wrote " << (out_dir / "table_summary.csv").string() << "\n";
  return 0;
}

// --- experiment sweep ---------------------------------------------------------

struct SweepArgs {
  std::string table_path;
  int rows = 2;
  int cols = 23;
  int adult_start_col = 4;
  double eps = 0.5;
  double grid_min = 0.1;
  double grid_max = 1.5;
  double grid_step = 0.05;
  long long nsim = 20000;
  uint64_t seed = 0;
  std::string out;
};

int RunSweep(const SweepArgs& args) {
  ContingencyTable table;
  if (!args.table_path.empty()) {
    table = invdp::LoadTableCsv(args.table_path);
  } else {
    Rng table_rng = Rng(args.seed).Substream(kSweepTableStream);
    table = invdp::SampleSyntheticTable(args.rows, args.cols, table_rng);
  }
  std::vector<double> grid;
  for (double p = args.grid_min; p <= args.grid_max + 1e-12;
       p += args.grid_step) {
    grid.push_back(p);
  }
  const invdp::ProposalSweepResult sweep = invdp::RunProposalSweep(
      table, args.adult_start_col, args.eps, grid, args.nsim, args.seed);

  std::ostringstream csv;
  csv << "# " << invdp::kVersion << " sweep seed=" << args.seed
      << " eps=" << FormatDouble(args.eps) << "\n";
  csv << "proposal_epsilon,acceptance_rate\n";
  json points = json::array();
  for (const auto& point : sweep.points) {
    csv << FormatDouble(point.proposal_epsilon) << ","
        << FormatDouble(point.acceptance_rate) << "\n";
    points.push_back({{"proposal_epsilon", point.proposal_epsilon},
                      {"acceptance_rate", point.acceptance_rate}});
  }

  json report = BaseReport("experiment sweep");
  report["config"] = {{"table", args.table_path},
                      {"eps", args.eps},
                      {"grid_min", args.grid_min},
                      {"grid_max", args.grid_max},
                      {"grid_step", args.grid_step},
                      {"nsim", args.nsim},
                      {"adult_start_col", args.adult_start_col},
                      {"seed", args.seed}};
  report["points"] = points;
  report["best_proposal_epsilon"] = sweep.best_proposal;
  report["best_acceptance_rate"] = sweep.best_rate;

  const auto out_dir = EnsureOutDir(args.out);
  WriteReport(out_dir, "sweep_report.json", report);
  WriteTextFile(out_dir / "sweep.csv", csv.str());
  std::cout << "wrote " << (out_dir / "sweep.csv").string() << "\n";
  std::cout << "best proposal eps " << FormatDouble(sweep.best_proposal)
            << " at acceptance rate " << FormatDouble(sweep.best_rate) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private releases under exact invariants"};
  app.set_version_flag("--version", std::string(invdp::kVersion));
  app.require_subcommand(1);

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand(
      "sample", "Privatize a count table with independent noise");
  sample->add_option("--table", sample_args.table_path, "Input table CSV")
      ->required();
  sample->add_option("--eps", sample_args.eps, "Per-cell privacy budget");
  sample->add_option("--mechanism", sample_args.mechanism,
                     "Noise family: dg or laplace");
  sample->add_option("--sensitivity", sample_args.sensitivity,
                     "Per-cell sensitivity");
  sample->add_option("--seed", sample_args.seed, "RNG seed")->required();
  sample->add_option("--out", sample_args.out, "Output directory");

  ConditionArgs cond_args;
  CLI::App* condition = app.add_subcommand(
      "condition", "Sample a release conditioned on exact invariants");
  condition->add_option("--table", cond_args.table_path, "Input table CSV")
      ->required();
  condition->add_option("--invariants", cond_args.invariants_path,
                        "Invariant system JSON (default: published margins)");
  condition->add_option("--adult-col", cond_args.adult_start_col,
                        "First adult column for the default margins");
  condition->add_option("--eps", cond_args.eps, "Per-cell privacy budget");
  double cond_proposal = 0.0;
  CLI::Option* cond_proposal_opt = condition->add_option(
      "--eps-proposal", cond_proposal, "Proposal budget (default: --eps)");
  condition->add_option("--nsim", cond_args.nsim, "Chain length");
  long long cond_burn = -1;
  CLI::Option* cond_burn_opt = condition->add_option(
      "--burn-in", cond_burn, "Burn-in steps (default: nsim/10)");
  condition->add_option("--sensitivity", cond_args.sensitivity,
                        "Per-cell sensitivity");
  condition->add_option("--seed", cond_args.seed, "RNG seed")->required();
  condition->add_option("--out", cond_args.out, "Output directory");

  ProjectArgs project_args;
  CLI::App* project = app.add_subcommand(
      "project", "Project a noisy release onto the invariant set");
  project->add_option("--table", project_args.table_path, "Noisy release CSV")
      ->required();
  project->add_option("--invariants", project_args.invariants_path,
                      "Invariant system JSON")
      ->required();
  project->add_option("--out", project_args.out, "Output directory");

  AuditArgs audit_args;
  CLI::App* audit = app.add_subcommand(
      "audit", "Exact privacy audit of a small release scenario");
  audit->add_option("--scenario", audit_args.scenario,
                    "Built-in scenario: trivial, secrecy-singleton, twobin, "
                    "threshold");
  audit->add_option("--scenario-json", audit_args.scenario_json_path,
                    "Custom scenario JSON file (overrides --scenario)");
  audit->add_option("--eps", audit_args.eps, "Declared privacy budget");
  audit->add_option("--out", audit_args.out, "Output directory");

  CLI::App* experiment =
      app.add_subcommand("experiment", "Reproducible numerical studies");
  experiment->require_subcommand(1);

  TwoBinArgs twobin_args;
  CLI::App* twobin = experiment->add_subcommand(
      "twobin", "Two-cell table with a pinned total: variance study");
  twobin->add_option("--s1", twobin_args.s1, "First confidential cell");
  twobin->add_option("--s2", twobin_args.s2, "Second confidential cell");
  twobin->add_option("--eps", twobin_args.eps, "Privacy budget");
  twobin->add_option("--replicates", twobin_args.replicates, "Replicates");
  twobin->add_option("--betas", twobin_args.betas,
                     "Weights for the combined estimator");
  twobin->add_option("--seed", twobin_args.seed, "RNG seed")->required();
  twobin->add_option("--out", twobin_args.out, "Output directory");

  TableArgs table_args;
  CLI::App* table = experiment->add_subcommand(
      "table", "Synthetic demographic tables: method comparison");
  table->add_option("--num-tables", table_args.config.num_tables,
                    "Number of synthetic tables");
  table->add_option("--replicates", table_args.config.replicates,
                    "Releases per method per table");
  table->add_option("--nsim", table_args.config.nsim,
                    "Chain steps per conditional release");
  table->add_option("--eps-raw", table_args.config.eps_raw,
                    "Per-cell budget for the unconstrained methods");
  table->add_option("--eps", table_args.config.eps_constrained,
                    "Per-cell budget for the constrained methods");
  table->add_option("--eps-proposal", table_args.eps_proposal,
                    "Chain proposal budget (default: --eps)");
  table->add_option("--rows", table_args.config.rows, "Table rows");
  table->add_option("--cols", table_args.config.cols, "Table columns");
  table->add_option("--adult-col", table_args.config.adult_start_col,
                    "First adult column");
  table->add_option("--seed", table_args.seed, "RNG seed")->required();
  table->add_option("--out", table_args.out, "Output directory");

  SweepArgs sweep_args;
  CLI::App* sweep = experiment->add_subcommand(
      "sweep", "Acceptance rate vs proposal budget");
  sweep->add_option("--table", sweep_args.table_path,
                    "Table CSV (default: one synthetic table)");
  sweep->add_option("--rows", sweep_args.rows, "Synthetic table rows");
  sweep->add_option("--cols", sweep_args.cols, "Synthetic table columns");
  sweep->add_option("--adult-col", sweep_args.adult_start_col,
                    "First adult column");
  sweep->add_option("--eps", sweep_args.eps, "Base per-cell budget");
  sweep->add_option("--grid-min", sweep_args.grid_min, "Smallest proposal");
  sweep->add_option("--grid-max", sweep_args.grid_max, "Largest proposal");
  sweep->add_option("--grid-step", sweep_args.grid_step, "Grid spacing");
  sweep->add_option("--nsim", sweep_args.nsim, "Chain steps per grid point");
  sweep->add_option("--seed", sweep_args.seed, "RNG seed")->required();
  sweep->add_option("--out", sweep_args.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) return RunSample(sample_args);
    if (*condition) {
      if (*cond_proposal_opt) cond_args.eps_proposal = cond_proposal;
      if (*cond_burn_opt) cond_args.burn_in = cond_burn;
      return RunCondition(cond_args);
    }
    if (*project) return RunProject(project_args);
    if (*audit) return RunAudit(audit_args);
    if (*experiment) {
      if (*twobin) return RunTwoBin(twobin_args);
      if (*table) return RunTableStudy(table_args);
      if (*sweep) return RunSweep(sweep_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
