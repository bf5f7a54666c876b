// Copyright 2026 The ldpfim Authors
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

#ifndef LDPFIM_RANDOM_H_
#define LDPFIM_RANDOM_H_

#include <cstdint>
#include <limits>

namespace ldpfim {

// SplitMix64 finalizer. Full avalanche on 64-bit inputs.
constexpr uint64_t Mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Seeded random stream. Satisfies UniformRandomBitGenerator so it can drive
// the <random> distributions.
//
// Child streams are derived from the stream's construction seed (not its
// current position), so Child(i) is the same no matter how much of the parent
// has been consumed. Per-user streams are Child(user_index) of a phase stream,
// which makes serial and parallel report generation agree.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed) : seed_(seed), state_(Mix64(seed)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix64(state_);
  }

  Rng Child(uint64_t stream) const {
    return Rng(Mix64(seed_ ^ Mix64(stream + 0x632be59bd9b4e019ULL)));
  }

  uint64_t seed() const { return seed_; }

  // Uniform double in [0, 1).
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n) {
    // Lemire's nearly-divisionless method.
    unsigned __int128 product =
        static_cast<unsigned __int128>((*this)()) * n;
    uint64_t low = static_cast<uint64_t>(product);
    if (low < n) {
      const uint64_t threshold = -n % n;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<uint64_t>(product);
      }
    }
    return static_cast<uint64_t>(product >> 64);
  }

  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  uint64_t seed_;
  uint64_t state_;
};

}  // namespace ldpfim

#endif  // LDPFIM_RANDOM_H_
