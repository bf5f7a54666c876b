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

#ifndef LDPFIM_METRICS_H_
#define LDPFIM_METRICS_H_

#include <span>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/status/statusor.h"
#include "ldpfim/dataset.h"

namespace ldpfim {

// True top-k in rank order. Rank r (1-based) carries weight k + 1 - r.
class RankedTruth {
 public:
  explicit RankedTruth(std::vector<ItemsetKey> ranked);

  uint32_t k() const { return static_cast<uint32_t>(ranked_.size()); }
  const std::vector<ItemsetKey>& ranked() const { return ranked_; }
  // 0 for elements outside the true top-k.
  uint32_t Weight(const ItemsetKey& x) const;
  double TotalWeight() const { return k() * (k() + 1.0) / 2.0; }

 private:
  std::vector<ItemsetKey> ranked_;
  absl::flat_hash_map<ItemsetKey, uint32_t> weight_;
};

// |truth ∩ mined| / k.
absl::StatusOr<double> Acc(const RankedTruth& truth,
                           std::span<const ItemsetKey> mined);

// Rank-weighted overlap normalised to [0, 1].
absl::StatusOr<double> Ncr(const RankedTruth& truth,
                           std::span<const ItemsetKey> mined);

// (before - after) / before.
absl::StatusOr<double> DropRatio(double met_no_attack, double met_attack);

}  // namespace ldpfim

#endif  // LDPFIM_METRICS_H_
