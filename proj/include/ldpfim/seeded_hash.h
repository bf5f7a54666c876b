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

#ifndef LDPFIM_SEEDED_HASH_H_
#define LDPFIM_SEEDED_HASH_H_

#include <cstdint>

#include "ldpfim/random.h"

namespace ldpfim {

// H_seed: [0, 2^64) -> [0, g). Deterministic in (seed, item), approximately
// uniform across items for a fixed seed.
class SeededHash {
 public:
  SeededHash(uint64_t seed, uint32_t g)
      : key_(Mix64(seed ^ 0xd1b54a32d192ed03ULL)), g_(g) {}

  uint32_t operator()(uint64_t item) const {
    const uint64_t h = Mix64(key_ + Mix64(item ^ 0x8cb92ba72f3d8dd7ULL));
    // Multiply-shift reduction onto [0, g).
    return static_cast<uint32_t>(
        (static_cast<unsigned __int128>(h) * g_) >> 64);
  }

  uint32_t g() const { return g_; }

 private:
  uint64_t key_;
  uint32_t g_;
};

}  // namespace ldpfim

#endif  // LDPFIM_SEEDED_HASH_H_
