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

#include "invdp/mechanisms.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace invdp {
namespace {

constexpr double kQuantileBranchTolerance = 1e-12;

void CheckKind(const NoiseMechanism& mechanism, MechanismKind expected,
               const char* op) {
  if (mechanism.kind() != expected) {
    throw std::invalid_argument(std::string(op) +
                                ": wrong mechanism kind for this operation");
  }
}

void CheckOpenUnit(double v, const char* op) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::invalid_argument(std::string(op) +
                                ": probability argument must lie in (0, 1)");
  }
}

}  // namespace

PrivacyBudget::PrivacyBudget(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("PrivacyBudget: epsilon must be positive");
  }
}

Sensitivity::Sensitivity(double nabla) : nabla_(nabla) {
  if (!(nabla > 0.0) || !std::isfinite(nabla)) {
    throw std::invalid_argument("Sensitivity: nabla must be positive");
  }
}

NoiseMechanism::NoiseMechanism(MechanismKind kind, PrivacyBudget budget,
                               Sensitivity sensitivity)
    : kind_(kind),
      budget_(budget),
      sensitivity_(sensitivity),
      decay_(std::exp(-budget.epsilon() / sensitivity.nabla())),
      log_decay_(-budget.epsilon() / sensitivity.nabla()),
      scale_(sensitivity.nabla() / budget.epsilon()) {}

NoiseMechanism NoiseMechanism::Laplace(double epsilon, double sensitivity) {
  return NoiseMechanism(MechanismKind::kLaplace, PrivacyBudget(epsilon),
                        Sensitivity(sensitivity));
}

NoiseMechanism NoiseMechanism::DoubleGeometric(double epsilon,
                                               double sensitivity) {
  return NoiseMechanism(MechanismKind::kDoubleGeometric,
                        PrivacyBudget(epsilon), Sensitivity(sensitivity));
}

namespace {

void CheckDecay(double decay, const char* op) {
  if (!(decay > 0.0 && decay < 1.0)) {
    throw std::invalid_argument(std::string(op) +
                                ": decay must lie in (0, 1)");
  }
}

// Shared quantile core; log_a is passed separately so mechanism callers can
// supply the exact -epsilon/nabla instead of log(exp(-epsilon/nabla)).
int QuantileImpl(double v, double a, double log_a) {
  const double boundary = 1.0 / (1.0 + a);

  const auto lower_branch = [&] {
    return static_cast<int>(
        std::ceil((-std::log(v) - std::log1p(a)) / log_a));
  };
  const auto upper_branch = [&] {
    return static_cast<int>(
        std::floor((std::log1p(-v) + std::log1p(a)) / log_a));
  };

  int u;
  if (std::abs(v - boundary) < kQuantileBranchTolerance) {
    // At the branch split both closed forms are evaluated; keep the one
    // whose CDF check passes (the smaller candidate wins ties).
    const int lo = lower_branch();
    const int hi = upper_branch();
    u = std::min(lo, hi);
    if (DoubleGeometricCdf(u, a) < v) u = std::max(lo, hi);
  } else if (v <= boundary) {
    u = lower_branch();
  } else {
    u = upper_branch();
  }

  // The closed forms are exact up to floating-point rounding of the logs;
  // enforce the smallest-u postcondition directly against the CDF.
  while (DoubleGeometricCdf(u, a) < v) ++u;
  while (DoubleGeometricCdf(u - 1, a) >= v) --u;
  return u;
}

}  // namespace

double DoubleGeometricPmf(int u, double decay) {
  CheckDecay(decay, "DoubleGeometricPmf");
  return (1.0 - decay) / (1.0 + decay) * std::pow(decay, std::abs(u));
}

double DoubleGeometricLogPmf(int u, double decay) {
  CheckDecay(decay, "DoubleGeometricLogPmf");
  return std::log1p(-decay) - std::log1p(decay) +
         std::abs(u) * std::log(decay);
}

double DoubleGeometricCdf(int u, double decay) {
  CheckDecay(decay, "DoubleGeometricCdf");
  if (u <= 0) {
    return std::pow(decay, -u) / (1.0 + decay);
  }
  return 1.0 - std::pow(decay, u + 1) / (1.0 + decay);
}

int DoubleGeometricQuantile(double v, double decay) {
  CheckDecay(decay, "DoubleGeometricQuantile");
  CheckOpenUnit(v, "DoubleGeometricQuantile");
  return QuantileImpl(v, decay, std::log(decay));
}

double DoubleGeometricPmf(int u, const NoiseMechanism& mechanism) {
  CheckKind(mechanism, MechanismKind::kDoubleGeometric, "DoubleGeometricPmf");
  return DoubleGeometricPmf(u, mechanism.decay());
}

double DoubleGeometricLogPmf(int u, const NoiseMechanism& mechanism) {
  CheckKind(mechanism, MechanismKind::kDoubleGeometric,
            "DoubleGeometricLogPmf");
  const double a = mechanism.decay();
  return std::log1p(-a) - std::log1p(a) +
         std::abs(u) * mechanism.log_decay();
}

double DoubleGeometricCdf(int u, const NoiseMechanism& mechanism) {
  CheckKind(mechanism, MechanismKind::kDoubleGeometric, "DoubleGeometricCdf");
  return DoubleGeometricCdf(u, mechanism.decay());
}

int DoubleGeometricQuantile(double v, const NoiseMechanism& mechanism) {
  CheckKind(mechanism, MechanismKind::kDoubleGeometric,
            "DoubleGeometricQuantile");
  CheckOpenUnit(v, "DoubleGeometricQuantile");
  return QuantileImpl(v, mechanism.decay(), mechanism.log_decay());
}

double LaplaceDensity(double u, const NoiseMechanism& mechanism) {
  return std::exp(LaplaceLogDensity(u, mechanism));
}

double LaplaceLogDensity(double u, const NoiseMechanism& mechanism) {
  CheckKind(mechanism, MechanismKind::kLaplace, "LaplaceLogDensity");
  const double b = mechanism.scale();
  return -std::abs(u) / b - std::log(2.0 * b);
}

double LaplaceQuantile(double v, const NoiseMechanism& mechanism) {
  CheckKind(mechanism, MechanismKind::kLaplace, "LaplaceQuantile");
  CheckOpenUnit(v, "LaplaceQuantile");
  const double b = mechanism.scale();
  if (v < 0.5) return b * std::log(2.0 * v);
  return -b * std::log1p(-2.0 * (v - 0.5));
}

double LaplaceDensity(double u, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("LaplaceDensity: scale must be positive");
  }
  return std::exp(-std::abs(u) / scale) / (2.0 * scale);
}

int SampleDoubleGeometricNoise(const NoiseMechanism& mechanism, Rng& rng) {
  return DoubleGeometricQuantile(rng.NextUniform(), mechanism);
}

double SampleLaplaceNoise(const NoiseMechanism& mechanism, Rng& rng) {
  return LaplaceQuantile(rng.NextUniform(), mechanism);
}

QueryVector Privatize(const QueryVector& confidential,
                      const NoiseMechanism& mechanism, Rng& rng) {
  if (confidential.size() < 1) {
    throw std::invalid_argument("Privatize: query must have dimension >= 1");
  }
  if (!confidential.allFinite()) {
    throw std::invalid_argument("Privatize: query entries must be finite");
  }
  QueryVector release(confidential.size());
  if (mechanism.kind() == MechanismKind::kDoubleGeometric) {
    for (Eigen::Index i = 0; i < confidential.size(); ++i) {
      if (confidential[i] != std::nearbyint(confidential[i])) {
        throw std::invalid_argument(
            "Privatize: double-geometric mechanism requires an "
            "integer-valued query");
      }
      release[i] = confidential[i] + SampleDoubleGeometricNoise(mechanism, rng);
    }
  } else {
    for (Eigen::Index i = 0; i < confidential.size(); ++i) {
      release[i] = confidential[i] + SampleLaplaceNoise(mechanism, rng);
    }
  }
  return release;
}

}  // namespace invdp
