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

#ifndef INVDP_INVARIANTS_H_
#define INVDP_INVARIANTS_H_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "invdp/mechanisms.h"

namespace invdp {

// The invariant set S* = { s : A s = a, B s >= b }. A must have full row
// rank; redundant or inconsistent equality rows are rejected at
// construction, as are systems with an empty feasible region.
class LinearInvariantSystem {
 public:
  static LinearInvariantSystem Create(Eigen::MatrixXd equality_matrix,
                                      Eigen::VectorXd equality_rhs,
                                      Eigen::MatrixXd inequality_matrix,
                                      Eigen::VectorXd inequality_rhs);
  static LinearInvariantSystem EqualityOnly(Eigen::MatrixXd equality_matrix,
                                            Eigen::VectorXd equality_rhs);

  int dimension() const { return static_cast<int>(equality_matrix_.cols()); }
  int num_equalities() const {
    return static_cast<int>(equality_matrix_.rows());
  }
  int num_inequalities() const {
    return static_cast<int>(inequality_matrix_.rows());
  }
  bool has_inequalities() const { return num_inequalities() > 0; }

  const Eigen::MatrixXd& equality_matrix() const { return equality_matrix_; }
  const Eigen::VectorXd& equality_rhs() const { return equality_rhs_; }
  const Eigen::MatrixXd& inequality_matrix() const {
    return inequality_matrix_;
  }
  const Eigen::VectorXd& inequality_rhs() const { return inequality_rhs_; }

  // All coefficients and right-hand sides integral. Such systems are
  // checked with tolerance 0: lattice points either satisfy them exactly or
  // not at all.
  bool integer_valued() const { return integer_valued_; }
  double default_tolerance() const { return integer_valued_ ? 0.0 : 1e-8; }

  // True when the inequality block is exactly s >= 0 (identity matrix, zero
  // rhs); lets hot loops check feasibility coordinate-wise.
  bool nonnegativity_only() const { return nonnegativity_only_; }

  // A point with A s = a and B s >= b found by the construction-time
  // feasibility search (real-valued even for integer systems).
  const Eigen::VectorXd& feasible_point() const { return feasible_point_; }

 private:
  LinearInvariantSystem(Eigen::MatrixXd equality_matrix,
                        Eigen::VectorXd equality_rhs,
                        Eigen::MatrixXd inequality_matrix,
                        Eigen::VectorXd inequality_rhs);

  Eigen::MatrixXd equality_matrix_;
  Eigen::VectorXd equality_rhs_;
  Eigen::MatrixXd inequality_matrix_;
  Eigen::VectorXd inequality_rhs_;
  Eigen::VectorXd feasible_point_;
  bool integer_valued_;
  bool nonnegativity_only_;
};

// The coordinates Algorithm-style samplers propose on; the complement is
// recovered from the equality constraints. Indices are 0-based, sorted and
// unique.
class ProposalIndexSet {
 public:
  explicit ProposalIndexSet(std::vector<int> indices);

  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }

  // The complement within {0, ..., dimension-1}.
  std::vector<int> Complement(int dimension) const;

 private:
  std::vector<int> indices_;
};

// ||A s - a||_inf <= tol and B s >= b - tol. tol defaults to the system's
// tolerance (0 for integer systems, 1e-8 otherwise).
bool Satisfies(const QueryVector& point, const LinearInvariantSystem& system,
               std::optional<double> tolerance = std::nullopt);

// True iff |I| = d - d_A, all indices are in range, and the complement
// block A[:, I^c] is nonsingular (so completion is well defined).
bool ValidateIndexSet(const ProposalIndexSet& index_set,
                      const LinearInvariantSystem& system);

// Solves A[:, I^c] s_{I^c} = a - A[:, I] s_I and assembles the full vector.
// For integer systems, completed coordinates within 1e-6 of an integer are
// snapped so downstream equality checks are exact; coordinates further from
// the lattice are returned as solved.
QueryVector Complete(const Eigen::VectorXd& proposal_values,
                     const ProposalIndexSet& index_set,
                     const LinearInvariantSystem& system);

// Greedy column pivoting on A: row by row, pick the unchosen column with
// the largest pivot magnitude (ties to the lowest index) into I^c, then
// eliminate it from the other rows. The complement block is nonsingular by
// construction.
ProposalIndexSet AutoSelectIndexSet(const LinearInvariantSystem& system);

// A system plus a provenance note recording that S* is a function of the
// confidential data (mandated releases are data-dependent by nature).
struct InvariantSetDescriptor {
  LinearInvariantSystem system;
  std::string provenance;

  // Validates that the confidential query satisfies the system exactly.
  static InvariantSetDescriptor FromConfidential(
      const QueryVector& confidential, LinearInvariantSystem system,
      std::string provenance);
};

// JSON interchange: {"d": int, "A": [[...]], "a": [...], "B": [[...]],
// "b": [...], "index_set": [...]} with B, b, index_set optional and indices
// 0-based.
struct InvariantSpec {
  LinearInvariantSystem system;
  std::optional<ProposalIndexSet> index_set;
};
InvariantSpec LoadInvariantSystemJson(const std::string& path);
InvariantSpec ParseInvariantSystemJson(const std::string& text);
void SaveInvariantSystemJson(const std::string& path,
                             const LinearInvariantSystem& system,
                             const std::optional<ProposalIndexSet>& index_set);
std::string WriteInvariantSystemJson(
    const LinearInvariantSystem& system,
    const std::optional<ProposalIndexSet>& index_set);

// A labelled R x C count table loaded from CSV: one header row of column
// labels (an optional leading corner label), then one data row per table
// row, each with an optional leading row label.
struct ContingencyTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  Eigen::MatrixXd cells;

  int rows() const { return static_cast<int>(cells.rows()); }
  int cols() const { return static_cast<int>(cells.cols()); }
  // Row-major vectorization: row 0 left to right, then row 1, ...
  QueryVector Vectorized() const;
};
ContingencyTable LoadTableCsv(const std::string& path);
ContingencyTable ParseTableCsv(const std::string& text);

}  // namespace invdp

#endif  // INVDP_INVARIANTS_H_
