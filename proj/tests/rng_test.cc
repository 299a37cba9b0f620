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

#include "invdp/rng.h"

#include <cmath>
#include <cstdint>

#include "gtest/gtest.h"

namespace invdp {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.NextUniform(), b.NextUniform()) << "diverged at draw " << i;
  }
}

TEST(RngTest, DifferentSeedsDiffer) {
  Rng a(1);
  Rng b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) {
    if (a.NextUniform() == b.NextUniform()) ++equal;
  }
  EXPECT_LT(equal, 3);
}

TEST(RngTest, UniformLiesInOpenUnitInterval) {
  Rng rng(7);
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.NextUniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngTest, UniformMomentsMatch) {
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.NextUniform();
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  EXPECT_NEAR(mean, 0.5, 0.005);
  EXPECT_NEAR(var, 1.0 / 12.0, 0.005);
}

TEST(RngTest, SubstreamIsDeterministic) {
  const Rng root(9);
  Rng a = root.Substream(5);
  Rng b = root.Substream(5);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.NextUniform(), b.NextUniform());
  }
}

TEST(RngTest, SubstreamsWithDifferentIdsDiffer) {
  const Rng root(9);
  Rng a = root.Substream(0);
  Rng b = root.Substream(1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) {
    if (a.NextUniform() == b.NextUniform()) ++equal;
  }
  EXPECT_LT(equal, 3);
}

// Substreams derive from the seed, not from engine state, so consuming
// draws from the parent must not move its substreams.
TEST(RngTest, SubstreamIgnoresParentConsumption) {
  Rng parent(13);
  Rng before = parent.Substream(3);
  for (int i = 0; i < 50; ++i) parent.NextUniform();
  Rng after = parent.Substream(3);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(before.NextUniform(), after.NextUniform());
  }
}

TEST(RngTest, NestedSubstreamsAreDistinct) {
  const Rng root(17);
  Rng ab = root.Substream(1).Substream(2);
  Rng ba = root.Substream(2).Substream(1);
  Rng a = root.Substream(1);
  int equal_ab_ba = 0, equal_ab_a = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = ab.NextUniform();
    if (x == ba.NextUniform()) ++equal_ab_ba;
    if (x == a.NextUniform()) ++equal_ab_a;
  }
  EXPECT_LT(equal_ab_ba, 3);
  EXPECT_LT(equal_ab_a, 3);
}

}  // namespace
}  // namespace invdp
