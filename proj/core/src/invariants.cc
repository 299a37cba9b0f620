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

#include "invdp/invariants.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace invdp {
namespace {

constexpr double kRankThreshold = 1e-10;
constexpr double kFeasibilityTolerance = 1e-9;
constexpr int kFeasibilityMaxIterations = 20000;
constexpr double kIntegerSnapTolerance = 1e-6;

bool IsIntegral(double x) { return std::isfinite(x) && x == std::nearbyint(x); }

bool AllIntegral(const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!IsIntegral(m(i, j))) return false;
    }
  }
  return true;
}

// Projects y onto {s : A s = a} using a prefactored AA^T.
Eigen::VectorXd ProjectEquality(const Eigen::VectorXd& y,
                                const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& a,
                                const Eigen::LLT<Eigen::MatrixXd>& gram) {
  return y - A.transpose() * gram.solve(A * y - a);
}

}  // namespace

LinearInvariantSystem::LinearInvariantSystem(Eigen::MatrixXd equality_matrix,
                                             Eigen::VectorXd equality_rhs,
                                             Eigen::MatrixXd inequality_matrix,
                                             Eigen::VectorXd inequality_rhs)
    : equality_matrix_(std::move(equality_matrix)),
      equality_rhs_(std::move(equality_rhs)),
      inequality_matrix_(std::move(inequality_matrix)),
      inequality_rhs_(std::move(inequality_rhs)) {
  const Eigen::Index d = equality_matrix_.cols();
  const Eigen::Index rows = equality_matrix_.rows();
  if (d < 1 || rows < 1) {
    throw std::invalid_argument(
        "LinearInvariantSystem: equality block must be nonempty");
  }
  if (equality_rhs_.size() != rows) {
    throw std::invalid_argument(
        "LinearInvariantSystem: equality rhs length does not match A");
  }
  if (rows > d) {
    throw std::invalid_argument(
        "LinearInvariantSystem: more equality rows than dimensions");
  }
  if (inequality_matrix_.rows() != inequality_rhs_.size()) {
    throw std::invalid_argument(
        "LinearInvariantSystem: inequality rhs length does not match B");
  }
  if (inequality_matrix_.rows() > 0 && inequality_matrix_.cols() != d) {
    throw std::invalid_argument(
        "LinearInvariantSystem: inequality block has wrong column count");
  }
  if (!equality_matrix_.allFinite() || !equality_rhs_.allFinite() ||
      !inequality_matrix_.allFinite() || !inequality_rhs_.allFinite()) {
    throw std::invalid_argument(
        "LinearInvariantSystem: coefficients must be finite");
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(equality_matrix_);
  lu.setThreshold(kRankThreshold);
  if (lu.rank() != rows) {
    throw std::invalid_argument(
        "LinearInvariantSystem: equality rows must be linearly independent");
  }

  integer_valued_ = AllIntegral(equality_matrix_) &&
                    AllIntegral(equality_rhs_) &&
                    AllIntegral(inequality_matrix_) &&
                    AllIntegral(inequality_rhs_);
  nonnegativity_only_ =
      inequality_matrix_.rows() == d && inequality_matrix_.cols() == d &&
      inequality_matrix_.isIdentity(0.0) && inequality_rhs_.isZero(0.0);

  // Phase-1 feasibility: start from the minimum-norm equality solution and
  // alternate most-violated halfspace corrections with equality
  // re-projection. Convergence certifies S* is nonempty.
  Eigen::LLT<Eigen::MatrixXd> gram(equality_matrix_ *
                                   equality_matrix_.transpose());
  Eigen::VectorXd s =
      equality_matrix_.transpose() * gram.solve(equality_rhs_);
  if (inequality_matrix_.rows() > 0) {
    bool feasible = false;
    for (int iter = 0; iter < kFeasibilityMaxIterations; ++iter) {
      Eigen::VectorXd slack = inequality_matrix_ * s - inequality_rhs_;
      Eigen::Index worst;
      if (slack.minCoeff(&worst) >= -kFeasibilityTolerance) {
        feasible = true;
        break;
      }
      const Eigen::VectorXd row = inequality_matrix_.row(worst).transpose();
      s += (-slack[worst] / row.squaredNorm()) * row;
      s = ProjectEquality(s, equality_matrix_, equality_rhs_, gram);
    }
    if (!feasible) {
      throw std::invalid_argument(
          "LinearInvariantSystem: infeasible system (phase-1 search failed)");
    }
  }
  feasible_point_ = std::move(s);
}

LinearInvariantSystem LinearInvariantSystem::Create(
    Eigen::MatrixXd equality_matrix, Eigen::VectorXd equality_rhs,
    Eigen::MatrixXd inequality_matrix, Eigen::VectorXd inequality_rhs) {
  return LinearInvariantSystem(std::move(equality_matrix),
                               std::move(equality_rhs),
                               std::move(inequality_matrix),
                               std::move(inequality_rhs));
}

LinearInvariantSystem LinearInvariantSystem::EqualityOnly(
    Eigen::MatrixXd equality_matrix, Eigen::VectorXd equality_rhs) {
  const Eigen::Index d = equality_matrix.cols();
  return LinearInvariantSystem(std::move(equality_matrix),
                               std::move(equality_rhs),
                               Eigen::MatrixXd(0, d), Eigen::VectorXd(0));
}

ProposalIndexSet::ProposalIndexSet(std::vector<int> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) !=
      indices_.end()) {
    throw std::invalid_argument("ProposalIndexSet: duplicate index");
  }
  if (!indices_.empty() && indices_.front() < 0) {
    throw std::invalid_argument("ProposalIndexSet: negative index");
  }
}

std::vector<int> ProposalIndexSet::Complement(int dimension) const {
  std::vector<int> complement;
  complement.reserve(dimension - indices_.size());
  auto it = indices_.begin();
  for (int i = 0; i < dimension; ++i) {
    if (it != indices_.end() && *it == i) {
      ++it;
    } else {
      complement.push_back(i);
    }
  }
  return complement;
}

bool Satisfies(const QueryVector& point, const LinearInvariantSystem& system,
               std::optional<double> tolerance) {
  if (point.size() != system.dimension()) {
    throw std::invalid_argument("Satisfies: point has wrong dimension");
  }
  const double tol = tolerance.value_or(system.default_tolerance());
  if (((system.equality_matrix() * point - system.equality_rhs())
           .cwiseAbs()
           .maxCoeff()) > tol) {
    return false;
  }
  if (system.has_inequalities()) {
    const Eigen::VectorXd slack =
        system.inequality_matrix() * point - system.inequality_rhs();
    if (slack.minCoeff() < -tol) return false;
  }
  return true;
}

bool ValidateIndexSet(const ProposalIndexSet& index_set,
                      const LinearInvariantSystem& system) {
  const int d = system.dimension();
  const int d_a = system.num_equalities();
  if (index_set.size() != d - d_a) return false;
  if (!index_set.indices().empty() && index_set.indices().back() >= d) {
    return false;
  }
  const std::vector<int> complement = index_set.Complement(d);
  Eigen::MatrixXd block(d_a, d_a);
  for (int j = 0; j < d_a; ++j) {
    block.col(j) = system.equality_matrix().col(complement[j]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
  lu.setThreshold(kRankThreshold);
  return lu.rank() == d_a;
}

QueryVector Complete(const Eigen::VectorXd& proposal_values,
                     const ProposalIndexSet& index_set,
                     const LinearInvariantSystem& system) {
  const int d = system.dimension();
  const int d_a = system.num_equalities();
  if (index_set.size() != d - d_a) {
    throw std::invalid_argument("Complete: |I| must equal d - d_A");
  }
  if (proposal_values.size() != index_set.size()) {
    throw std::invalid_argument(
        "Complete: proposal values do not match index set size");
  }
  if (!index_set.indices().empty() &&
      index_set.indices().back() >= d) {
    throw std::invalid_argument("Complete: index out of range");
  }

  const std::vector<int> complement = index_set.Complement(d);
  Eigen::MatrixXd block(d_a, d_a);
  for (int j = 0; j < d_a; ++j) {
    block.col(j) = system.equality_matrix().col(complement[j]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
  lu.setThreshold(kRankThreshold);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("Complete: singular completion system");
  }

  Eigen::VectorXd rhs = system.equality_rhs();
  for (int j = 0; j < index_set.size(); ++j) {
    rhs -= proposal_values[j] *
           system.equality_matrix().col(index_set.indices()[j]);
  }
  Eigen::VectorXd completed = lu.solve(rhs);

  QueryVector full(d);
  for (int j = 0; j < index_set.size(); ++j) {
    full[index_set.indices()[j]] = proposal_values[j];
  }
  for (int j = 0; j < d_a; ++j) {
    double value = completed[j];
    if (system.integer_valued()) {
      const double snapped = std::nearbyint(value);
      if (std::abs(value - snapped) <= kIntegerSnapTolerance) value = snapped;
    }
    full[complement[j]] = value;
  }
  return full;
}

ProposalIndexSet AutoSelectIndexSet(const LinearInvariantSystem& system) {
  const int d = system.dimension();
  const int d_a = system.num_equalities();
  Eigen::MatrixXd work = system.equality_matrix();
  std::vector<bool> chosen(d, false);
  std::vector<int> pinned;
  pinned.reserve(d_a);
  for (int r = 0; r < d_a; ++r) {
    int best = -1;
    double best_mag = kRankThreshold;
    for (int j = 0; j < d; ++j) {
      if (chosen[j]) continue;
      const double mag = std::abs(work(r, j));
      if (mag > best_mag) {
        best = j;
        best_mag = mag;
      }
    }
    if (best < 0) {
      throw std::invalid_argument(
          "AutoSelectIndexSet: equality rows are rank deficient");
    }
    chosen[best] = true;
    pinned.push_back(best);
    work.row(r) /= work(r, best);
    for (int r2 = 0; r2 < d_a; ++r2) {
      if (r2 == r) continue;
      work.row(r2) -= work(r2, best) * work.row(r);
    }
  }
  std::vector<int> proposal;
  proposal.reserve(d - d_a);
  for (int j = 0; j < d; ++j) {
    if (!chosen[j]) proposal.push_back(j);
  }
  return ProposalIndexSet(std::move(proposal));
}

InvariantSetDescriptor InvariantSetDescriptor::FromConfidential(
    const QueryVector& confidential, LinearInvariantSystem system,
    std::string provenance) {
  if (!Satisfies(confidential, system)) {
    throw std::invalid_argument(
        "InvariantSetDescriptor: confidential query does not satisfy the "
        "system it is supposed to induce");
  }
  return InvariantSetDescriptor{std::move(system), std::move(provenance)};
}

namespace {

using nlohmann::json;

Eigen::MatrixXd ParseMatrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw std::invalid_argument("invariant JSON: \"" + name +
                                "\" must be a nonempty array of rows");
  }
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw std::invalid_argument("invariant JSON: ragged rows in \"" + name +
                                  "\"");
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) {
        throw std::invalid_argument("invariant JSON: non-numeric entry in \"" +
                                    name + "\"");
      }
      m(i, c) = j[i][c].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd ParseVector(const json& j, const std::string& name) {
  if (!j.is_array()) {
    throw std::invalid_argument("invariant JSON: \"" + name +
                                "\" must be an array");
  }
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw std::invalid_argument("invariant JSON: non-numeric entry in \"" +
                                  name + "\"");
    }
    v[i] = j[i].get<double>();
  }
  return v;
}

}  // namespace

InvariantSpec ParseInvariantSystemJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invariant JSON: ") + e.what());
  }
  if (!j.contains("d") || !j["d"].is_number_integer()) {
    throw std::invalid_argument("invariant JSON: missing integer \"d\"");
  }
  if (!j.contains("A") || !j.contains("a")) {
    throw std::invalid_argument("invariant JSON: missing \"A\" or \"a\"");
  }
  const int d = j["d"].get<int>();
  Eigen::MatrixXd A = ParseMatrix(j["A"], "A");
  Eigen::VectorXd a = ParseVector(j["a"], "a");
  if (A.cols() != d) {
    throw std::invalid_argument(
        "invariant JSON: \"A\" column count does not match \"d\"");
  }
  Eigen::MatrixXd B(0, d);
  Eigen::VectorXd b(0);
  if (j.contains("B") != j.contains("b")) {
    throw std::invalid_argument(
        "invariant JSON: \"B\" and \"b\" must be given together");
  }
  if (j.contains("B")) {
    B = ParseMatrix(j["B"], "B");
    b = ParseVector(j["b"], "b");
    if (B.cols() != d) {
      throw std::invalid_argument(
          "invariant JSON: \"B\" column count does not match \"d\"");
    }
  }
  LinearInvariantSystem system = LinearInvariantSystem::Create(
      std::move(A), std::move(a), std::move(B), std::move(b));
  std::optional<ProposalIndexSet> index_set;
  if (j.contains("index_set")) {
    if (!j["index_set"].is_array()) {
      throw std::invalid_argument(
          "invariant JSON: \"index_set\" must be an array of 0-based ints");
    }
    std::vector<int> indices;
    for (const auto& e : j["index_set"]) {
      if (!e.is_number_integer()) {
        throw std::invalid_argument(
            "invariant JSON: non-integer entry in \"index_set\"");
      }
      indices.push_back(e.get<int>());
    }
    index_set.emplace(std::move(indices));
    if (!ValidateIndexSet(*index_set, system)) {
      throw std::invalid_argument(
          "invariant JSON: \"index_set\" is not a valid proposal set for "
          "this system (wrong size, out of range, or singular complement)");
    }
  }
  return InvariantSpec{std::move(system), std::move(index_set)};
}

InvariantSpec LoadInvariantSystemJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open invariant JSON file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseInvariantSystemJson(buffer.str());
}

std::string WriteInvariantSystemJson(
    const LinearInvariantSystem& system,
    const std::optional<ProposalIndexSet>& index_set) {
  json j;
  j["d"] = system.dimension();
  json A = json::array();
  for (int i = 0; i < system.num_equalities(); ++i) {
    json row = json::array();
    for (int c = 0; c < system.dimension(); ++c) {
      row.push_back(system.equality_matrix()(i, c));
    }
    A.push_back(std::move(row));
  }
  j["A"] = std::move(A);
  j["a"] = std::vector<double>(
      system.equality_rhs().data(),
      system.equality_rhs().data() + system.equality_rhs().size());
  if (system.has_inequalities()) {
    json B = json::array();
    for (int i = 0; i < system.num_inequalities(); ++i) {
      json row = json::array();
      for (int c = 0; c < system.dimension(); ++c) {
        row.push_back(system.inequality_matrix()(i, c));
      }
      B.push_back(std::move(row));
    }
    j["B"] = std::move(B);
    j["b"] = std::vector<double>(
        system.inequality_rhs().data(),
        system.inequality_rhs().data() + system.inequality_rhs().size());
  }
  if (index_set.has_value()) {
    j["index_set"] = index_set->indices();
  }
  return j.dump(2);
}

void SaveInvariantSystemJson(
    const std::string& path, const LinearInvariantSystem& system,
    const std::optional<ProposalIndexSet>& index_set) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write invariant JSON file: " + path);
  }
  out << WriteInvariantSystemJson(system, index_set) << "\n";
}

namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool ParseNumber(const std::string& s, double* out) {
  if (s.empty()) return false;
  try {
    size_t consumed = 0;
    *out = std::stod(s, &consumed);
    return consumed == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

ContingencyTable ParseTableCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    rows.push_back(SplitCsvLine(trimmed));
  }
  if (rows.size() < 2) {
    throw std::invalid_argument(
        "table CSV: need a header row and at least one data row");
  }

  ContingencyTable table;
  std::vector<std::vector<double>> data;
  bool has_row_labels = false;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.empty()) continue;
    double first = 0;
    const bool labelled = !ParseNumber(fields[0], &first);
    if (r == 1) {
      has_row_labels = labelled;
    } else if (labelled != has_row_labels) {
      throw std::invalid_argument(
          "table CSV: inconsistent row labelling across data rows");
    }
    std::vector<double> values;
    const size_t start = has_row_labels ? 1 : 0;
    if (has_row_labels) table.row_labels.push_back(fields[0]);
    for (size_t c = start; c < fields.size(); ++c) {
      double v = 0;
      if (!ParseNumber(fields[c], &v)) {
        throw std::invalid_argument("table CSV: non-numeric cell \"" +
                                    fields[c] + "\"");
      }
      values.push_back(v);
    }
    if (!data.empty() && values.size() != data.front().size()) {
      throw std::invalid_argument("table CSV: ragged data rows");
    }
    data.push_back(std::move(values));
  }
  if (data.empty() || data.front().empty()) {
    throw std::invalid_argument("table CSV: no data cells");
  }

  const size_t ncols = data.front().size();
  const auto& header = rows.front();
  if (header.size() == ncols + 1) {
    table.column_labels.assign(header.begin() + 1, header.end());
  } else if (header.size() == ncols) {
    table.column_labels.assign(header.begin(), header.end());
  } else {
    throw std::invalid_argument(
        "table CSV: header width does not match data width");
  }

  table.cells.resize(data.size(), ncols);
  for (size_t r = 0; r < data.size(); ++r) {
    for (size_t c = 0; c < ncols; ++c) table.cells(r, c) = data[r][c];
  }
  return table;
}

ContingencyTable LoadTableCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open table CSV file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseTableCsv(buffer.str());
}

QueryVector ContingencyTable::Vectorized() const {
  QueryVector v(cells.size());
  int k = 0;
  for (int r = 0; r < rows(); ++r) {
    for (int c = 0; c < cols(); ++c) v[k++] = cells(r, c);
  }
  return v;
}

}  // namespace invdp
