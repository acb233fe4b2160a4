// Copyright 2026 The jndmap Authors. All Rights Reserved.
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

// Counter-based SplitMix64 streams. The generator is fully specified here so
// other implementations can reproduce the exact same draws:
//
//   next():   state += 0x9e3779b97f4a7c15; return Mix64(state)
//   Mix64(z): z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//             z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//             return z ^ (z >> 31)
//   Uniform(): (next() >> 11) * 2^-53, in [0, 1)
//   Normal():  Box-Muller, cosine branch only:
//              u1 = 1 - Uniform(), u2 = Uniform(),
//              sqrt(-2 ln u1) * cos(2 pi u2)
//
// Sub-streams are derived by folding keys into the seed:
//   s = seed; for k in keys: s = Mix64(s ^ Mix64(k + 0x9e3779b97f4a7c15))

#ifndef JNDMAP_RNG_H_
#define JNDMAP_RNG_H_

#include <cstdint>
#include <initializer_list>

namespace jndmap {

std::uint64_t Mix64(std::uint64_t z);

class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  // Independent stream for (seed, keys...).
  static Rng Derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t Next();
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal();

 private:
  std::uint64_t state_;
};

}  // namespace jndmap

#endif  // JNDMAP_RNG_H_
