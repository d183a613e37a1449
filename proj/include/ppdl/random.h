// Copyright 2026 The ppdl Authors
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

#ifndef PPDL_RANDOM_H_
#define PPDL_RANDOM_H_

#include <cstdint>
#include <random>

namespace ppdl {

// Explicit seed carried by every stochastic operation. There is no implicit
// or wall-clock seeding anywhere in the library.
struct RngSeed {
  uint64_t value = 0;
};

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent sub-streams from a master
// seed by counter, so that results do not depend on evaluation order.
constexpr uint64_t MixBits(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr RngSeed DeriveSeed(RngSeed parent, uint64_t stream) {
  return RngSeed{
      MixBits(MixBits(parent.value) ^ MixBits(stream + 0x632be59bd9b4e019ULL))};
}

inline Rng MakeRng(RngSeed seed) { return Rng(MixBits(seed.value)); }

inline double UniformUnit(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double StandardNormal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace ppdl

#endif  // PPDL_RANDOM_H_
