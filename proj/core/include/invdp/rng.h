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

#ifndef INVDP_RNG_H_
#define INVDP_RNG_H_

#include <cstdint>
#include <random>

namespace invdp {

// Deterministic pseudo-random stream with explicit seeding and cheap
// substream derivation. All stochastic code in this library draws from an
// injected Rng; there is no global generator. Uniform doubles are built
// directly from the engine's 64-bit output so results never depend on
// standard-library distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(Scramble(seed)) {}

  uint64_t seed() const { return seed_; }

  uint64_t NextUint64() { return engine_(); }

  // Uniform on the open interval (0, 1). The value (k + 0.5) * 2^-53 is
  // never 0 or 1, so it is always a valid argument for inverse-CDF
  // transforms.
  double NextUniform() {
    return (static_cast<double>(NextUint64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Derives an independent generator for a parallel or restartable unit of
  // work. Deterministic in (seed, stream); the derived seed is itself a
  // valid base for further substreams.
  Rng Substream(uint64_t stream) const { return Rng(Mix(seed_, stream)); }

 private:
  // splitmix64 finalizer; decorrelates adjacent seeds before they reach the
  // mt19937_64 state setup.
  static uint64_t Scramble(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static uint64_t Mix(uint64_t a, uint64_t b) {
    return Scramble(a ^ Scramble(b + 0x632be59bd9b4e019ULL));
  }

  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace invdp

#endif  // INVDP_RNG_H_
