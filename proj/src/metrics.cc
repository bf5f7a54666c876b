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

#include "ldpfim/metrics.h"

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace ldpfim {

RankedTruth::RankedTruth(std::vector<ItemsetKey> ranked)
    : ranked_(std::move(ranked)) {
  for (uint32_t r = 0; r < ranked_.size(); ++r) {
    weight_.emplace(ranked_[r], k() - r);
  }
}

uint32_t RankedTruth::Weight(const ItemsetKey& x) const {
  auto it = weight_.find(x);
  return it == weight_.end() ? 0 : it->second;
}

namespace {

absl::Status CheckSize(const RankedTruth& truth, size_t mined) {
  if (mined != truth.k()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "mined list has %d entries, expected k = %d", mined, truth.k()));
  }
  if (truth.k() == 0) return absl::InvalidArgumentError("k must be >= 1");
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> Acc(const RankedTruth& truth,
                           std::span<const ItemsetKey> mined) {
  if (absl::Status s = CheckSize(truth, mined.size()); !s.ok()) return s;
  absl::flat_hash_set<ItemsetKey> seen;
  uint32_t hits = 0;
  for (const ItemsetKey& x : mined) {
    if (seen.insert(x).second && truth.Weight(x) > 0) ++hits;
  }
  return static_cast<double>(hits) / truth.k();
}

absl::StatusOr<double> Ncr(const RankedTruth& truth,
                           std::span<const ItemsetKey> mined) {
  if (absl::Status s = CheckSize(truth, mined.size()); !s.ok()) return s;
  absl::flat_hash_set<ItemsetKey> seen;
  double sum = 0;
  for (const ItemsetKey& x : mined) {
    if (seen.insert(x).second) sum += truth.Weight(x);
  }
  return sum / truth.TotalWeight();
}

absl::StatusOr<double> DropRatio(double met_no_attack, double met_attack) {
  if (met_no_attack == 0) {
    return absl::InvalidArgumentError("drop ratio undefined for a zero base");
  }
  return (met_no_attack - met_attack) / met_no_attack;
}

}  // namespace ldpfim
