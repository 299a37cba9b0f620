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
// Microbenchmarks for the hot paths: integer noise draws, chain steps on a
// demographic-scale system, and the nonnegative projection.

#include <benchmark/benchmark.h>

#include "invdp/experiments.h"
#include "invdp/invariants.h"
#include "invdp/mechanisms.h"
#include "invdp/postprocess.h"
#include "invdp/rng.h"
#include "invdp/sampler.h"

namespace invdp {
namespace {

void BM_DoubleGeometricSample(benchmark::State& state) {
  const NoiseMechanism mech = NoiseMechanism::DoubleGeometric(1.0);
  Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SampleDoubleGeometricNoise(mech, rng));
  }
}
BENCHMARK(BM_DoubleGeometricSample);

void BM_LaplaceSample(benchmark::State& state) {
  const NoiseMechanism mech = NoiseMechanism::Laplace(1.0);
  Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SampleLaplaceNoise(mech, rng));
  }
}
BENCHMARK(BM_LaplaceSample);

void BM_DoubleGeometricQuantile(benchmark::State& state) {
  const NoiseMechanism mech = NoiseMechanism::DoubleGeometric(1.0);
  Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(DoubleGeometricQuantile(rng.NextUniform(), mech));
  }
}
BENCHMARK(BM_DoubleGeometricQuantile);

// One proposal-complete-accept step on a 2 x 23 table with three margins.
void BM_ChainStep(benchmark::State& state) {
  Rng table_rng(11);
  const ContingencyTable table = SampleSyntheticTable(2, 23, table_rng);
  const QueryVector confidential = table.Vectorized();
  const LinearInvariantSystem system = MakeDemographicInvariants(table, 4);
  const NoiseMechanism base = NoiseMechanism::DoubleGeometric(0.5);
  ConditionalReleaseSampler sampler(confidential, base, system);
  Rng rng(13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.Step(rng));
  }
  state.counters["acceptance"] = sampler.diagnostics().acceptance_rate();
}
BENCHMARK(BM_ChainStep);

void BM_NonnegativeProject(benchmark::State& state) {
  Rng table_rng(17);
  const ContingencyTable table = SampleSyntheticTable(2, 23, table_rng);
  const QueryVector confidential = table.Vectorized();
  const LinearInvariantSystem system = MakeDemographicInvariants(table, 4);
  const NoiseMechanism mech = NoiseMechanism::DoubleGeometric(1.0);
  Rng rng(19);
  const QueryVector release = Privatize(confidential, mech, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(NonnegativeL2Project(release, system));
  }
}
BENCHMARK(BM_NonnegativeProject);

}  // namespace
}  // namespace invdp

BENCHMARK_MAIN();
