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

#ifndef INVDP_MECHANISMS_H_
#define INVDP_MECHANISMS_H_

#include <Eigen/Dense>
#include <cstdint>

#include "invdp/rng.h"

namespace invdp {

// Real-valued query answers; one coordinate per released statistic. Entries
// must be finite, and integer-valued when paired with the double-geometric
// mechanism.
using QueryVector = Eigen::VectorXd;

enum class MechanismKind {
  kLaplace,          // continuous, density (eps/(2*nabla)) * exp(-eps|u|/nabla)
  kDoubleGeometric,  // integer lattice, pmf ((1-a)/(1+a)) * a^|u|
};

// Privacy-loss budget epsilon > 0. Full suppression (epsilon = 0) is not
// representable by the additive mechanisms here and is rejected.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(double epsilon);
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

// Global L1 query sensitivity: the largest ||s(x) - s(x')||_1 over neighbor
// databases. Equals 1 for counting and per-group histogram queries on
// binary records.
class Sensitivity {
 public:
  explicit Sensitivity(double nabla);
  double nabla() const { return nabla_; }

 private:
  double nabla_;
};

// An additive per-coordinate noise mechanism. Noise in each coordinate is
// i.i.d.; the geometric decay a = exp(-epsilon/nabla) doubles as the Laplace
// rate, so both families attain the epsilon bound for unit query changes.
class NoiseMechanism {
 public:
  NoiseMechanism(MechanismKind kind, PrivacyBudget budget,
                 Sensitivity sensitivity);

  static NoiseMechanism Laplace(double epsilon, double sensitivity = 1.0);
  static NoiseMechanism DoubleGeometric(double epsilon,
                                        double sensitivity = 1.0);

  MechanismKind kind() const { return kind_; }
  double epsilon() const { return budget_.epsilon(); }
  double sensitivity() const { return sensitivity_.nabla(); }

  // a = exp(-epsilon/nabla); pmf, CDF and tail masses of the
  // double-geometric distribution are monomials in a.
  double decay() const { return decay_; }
  // log(a) = -epsilon/nabla, exact (not round-tripped through exp).
  double log_decay() const { return log_decay_; }
  // Laplace scale nabla/epsilon.
  double scale() const { return scale_; }

 private:
  MechanismKind kind_;
  PrivacyBudget budget_;
  Sensitivity sensitivity_;
  double decay_;
  double log_decay_;
  double scale_;
};

// P(U = u) for the double-geometric noise: ((1-a)/(1+a)) * a^|u|.
double DoubleGeometricPmf(int u, const NoiseMechanism& mechanism);
double DoubleGeometricLogPmf(int u, const NoiseMechanism& mechanism);

// F(u) = P(U <= u): a^-u/(1+a) for u <= 0 and 1 - a^(u+1)/(1+a) for u > 0.
double DoubleGeometricCdf(int u, const NoiseMechanism& mechanism);

// Smallest integer u with F(u) >= v, for v in the open interval (0, 1).
// Uses the closed-form branch split at v = 1/(1+a); within 1e-12 of the
// split both branches are evaluated and the one passing the CDF check wins.
int DoubleGeometricQuantile(double v, const NoiseMechanism& mechanism);

// The same quantities parameterized directly by the decay a in (0, 1), for
// derived distributions (conditional laws, proposal chains) that have a
// decay but no mechanism object of their own.
double DoubleGeometricPmf(int u, double decay);
double DoubleGeometricLogPmf(int u, double decay);
double DoubleGeometricCdf(int u, double decay);
int DoubleGeometricQuantile(double v, double decay);

// Laplace noise density and its inverse CDF (scale nabla/epsilon).
double LaplaceDensity(double u, const NoiseMechanism& mechanism);
double LaplaceLogDensity(double u, const NoiseMechanism& mechanism);
double LaplaceQuantile(double v, const NoiseMechanism& mechanism);

// Scale-parameterized Laplace density, for callers without a mechanism.
double LaplaceDensity(double u, double scale);

// One noise variate, via inverse-CDF transform of a single uniform.
int SampleDoubleGeometricNoise(const NoiseMechanism& mechanism, Rng& rng);
double SampleLaplaceNoise(const NoiseMechanism& mechanism, Rng& rng);

// Adds i.i.d. noise to every coordinate. Double-geometric releases stay on
// the integer lattice; the query must be integer-valued in that case.
QueryVector Privatize(const QueryVector& confidential,
                      const NoiseMechanism& mechanism, Rng& rng);

}  // namespace invdp

#endif  // INVDP_MECHANISMS_H_
