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

#include "invdp/postprocess.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace invdp {
namespace {

constexpr double kActiveTolerance = 1e-9;
constexpr double kStepTolerance = 1e-12;

// Reduced equality-constrained step: projects (target - x) restricted to the
// free coordinates onto null(A_F). A_F can lose row rank when the working set
// pins too many columns, so the projector goes through a rank-revealing COD.
Eigen::VectorXd FreeSetStep(const Eigen::VectorXd& x,
                            const Eigen::VectorXd& target,
                            const Eigen::MatrixXd& A,
                            const std::vector<int>& free_set) {
  const int nf = static_cast<int>(free_set.size());
  Eigen::MatrixXd A_f(A.rows(), nf);
  Eigen::VectorXd g_f(nf);
  for (int j = 0; j < nf; ++j) {
    A_f.col(j) = A.col(free_set[j]);
    g_f[j] = target[free_set[j]] - x[free_set[j]];
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A_f);
  const Eigen::VectorXd p_f = g_f - cod.pseudoInverse() * (A_f * g_f);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(x.size());
  for (int j = 0; j < nf; ++j) p[free_set[j]] = p_f[j];
  return p;
}

}  // namespace

QueryVector L2ProjectEquality(const QueryVector& release,
                              const LinearInvariantSystem& system) {
  if (release.size() != system.dimension()) {
    throw std::invalid_argument("L2ProjectEquality: wrong release dimension");
  }
  const Eigen::MatrixXd& A = system.equality_matrix();
  Eigen::LLT<Eigen::MatrixXd> gram(A * A.transpose());
  return release -
         A.transpose() * gram.solve(A * release - system.equality_rhs());
}

NonnegativeProjectionResult NonnegativeL2Project(
    const QueryVector& release, const LinearInvariantSystem& system,
    int max_iterations) {
  const int d = system.dimension();
  if (release.size() != d) {
    throw std::invalid_argument("NonnegativeL2Project: wrong dimension");
  }
  if (system.has_inequalities() && !system.nonnegativity_only()) {
    throw std::invalid_argument(
        "NonnegativeL2Project: only the nonnegativity cone is supported");
  }
  if (max_iterations <= 0) max_iterations = 50 + 10 * d;

  const Eigen::MatrixXd& A = system.equality_matrix();

  // Feasible start: the system's cached interior-ish point, with tiny
  // negative round-off clipped through a working set rather than by value.
  Eigen::VectorXd x = system.feasible_point();
  std::vector<bool> active(d, false);
  for (int i = 0; i < d; ++i) {
    if (x[i] <= kActiveTolerance) {
      active[i] = true;
      x[i] = std::max(x[i], 0.0);
    }
  }

  NonnegativeProjectionResult result;
  Eigen::VectorXd lambda;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    std::vector<int> free_set;
    for (int i = 0; i < d; ++i) {
      if (!active[i]) free_set.push_back(i);
    }
    Eigen::VectorXd p = free_set.empty()
                            ? Eigen::VectorXd::Zero(d)
                            : FreeSetStep(x, release, A, free_set);

    if (p.lpNorm<Eigen::Infinity>() <= kStepTolerance) {
      // Multipliers: lambda from least squares on the free block, mu on the
      // working set from stationarity. Drop the most negative mu (lowest
      // index on ties) or declare optimality.
      Eigen::VectorXd grad = x - release;
      Eigen::MatrixXd At_f(free_set.size(), A.rows());
      Eigen::VectorXd g_f(free_set.size());
      for (size_t j = 0; j < free_set.size(); ++j) {
        At_f.row(j) = A.col(free_set[j]).transpose();
        g_f[j] = grad[free_set[j]];
      }
      if (free_set.empty()) {
        lambda = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(
                     A.transpose())
                     .solve(grad);
      } else {
        lambda = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(At_f)
                     .solve(g_f);
      }
      mu = grad - A.transpose() * lambda;
      int worst = -1;
      double worst_mu = -kActiveTolerance;
      for (int i = 0; i < d; ++i) {
        if (active[i] && mu[i] < worst_mu) {
          worst = i;
          worst_mu = mu[i];
        }
      }
      if (worst < 0) {
        result.converged = true;
        break;
      }
      active[worst] = false;
      continue;
    }

    // Ratio test against the inactive nonnegativity bounds.
    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < d; ++i) {
      if (active[i] || p[i] >= -kStepTolerance) continue;
      const double ratio = -x[i] / p[i];
      if (ratio < alpha) {
        alpha = ratio;
        blocking = i;
      }
    }
    x += alpha * p;
    if (blocking >= 0) {
      active[blocking] = true;
      x[blocking] = 0.0;
    }
  }

  result.iterations = iter;
  result.solution = x;

  // Report the KKT residual at the returned point whether or not the
  // active-set loop declared victory.
  const Eigen::VectorXd grad = x - release;
  double residual = (A * x - system.equality_rhs()).cwiseAbs().maxCoeff();
  residual = std::max(residual, -std::min(0.0, x.minCoeff()));
  if (lambda.size() == A.rows()) {
    const Eigen::VectorXd stationarity = grad - A.transpose() * lambda - mu;
    residual = std::max(residual, stationarity.cwiseAbs().maxCoeff());
    residual = std::max(residual, -std::min(0.0, mu.minCoeff()));
    residual = std::max(residual, (mu.cwiseProduct(x)).cwiseAbs().maxCoeff());
  }
  result.kkt_residual = residual;
  return result;
}

double TwoBinWeightedFirstCell(const QueryVector& noisy, double total,
                               double beta) {
  if (noisy.size() != 2) {
    throw std::invalid_argument(
        "TwoBinWeightedFirstCell: release must have two cells");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument(
        "TwoBinWeightedFirstCell: beta must lie in [0, 1]");
  }
  if (!std::isfinite(total)) {
    throw std::invalid_argument("TwoBinWeightedFirstCell: total not finite");
  }
  return beta * noisy[0] + (1.0 - beta) * (total - noisy[1]);
}

QueryVector TwoBinWeightedRelease(const QueryVector& noisy, double total,
                                  double beta) {
  const double first = TwoBinWeightedFirstCell(noisy, total, beta);
  QueryVector out(2);
  out[0] = first;
  out[1] = total - first;
  return out;
}

}  // namespace invdp
