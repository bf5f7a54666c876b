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

#ifndef LDPFIM_DATASET_H_
#define LDPFIM_DATASET_H_

#include <compare>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "ldpfim/random.h"

namespace ldpfim {

// n transactions over items [0, d), stored row-compressed. Each row is
// sorted and duplicate-free.
class TransactionDb {
 public:
  TransactionDb() = default;

  // Sorts and deduplicates each transaction. Fails on an item >= d or when
  // the list is empty.
  static absl::StatusOr<TransactionDb> Create(
      uint32_t d, std::vector<std::vector<uint32_t>> transactions);

  uint32_t n() const { return static_cast<uint32_t>(offsets_.size() - 1); }
  uint32_t d() const { return d_; }
  std::span<const uint32_t> transaction(uint32_t j) const {
    return {items_.data() + offsets_[j], items_.data() + offsets_[j + 1]};
  }
  uint64_t total_items() const { return items_.size(); }

 private:
  uint32_t d_ = 0;
  std::vector<uint64_t> offsets_{0};
  std::vector<uint32_t> items_;
};

class ItemsetKey {
 public:
  ItemsetKey() = default;
  static absl::StatusOr<ItemsetKey> Create(std::vector<uint32_t> items);
  // Caller guarantees the items are strictly increasing and nonempty.
  static ItemsetKey FromSortedUnchecked(std::vector<uint32_t> items);

  const std::vector<uint32_t>& items() const { return items_; }
  size_t size() const { return items_.size(); }
  std::string ToString() const;  // "1 4 9"

  auto operator<=>(const ItemsetKey&) const = default;
  bool operator==(const ItemsetKey&) const = default;

  template <typename H>
  friend H AbslHashValue(H h, const ItemsetKey& k) {
    return H::combine(std::move(h), k.items_);
  }

 private:
  explicit ItemsetKey(std::vector<uint32_t> items) : items_(std::move(items)) {}
  std::vector<uint32_t> items_;
};

// One transaction per line, whitespace-separated item indices. Blank lines
// are skipped. d is max item + 1 unless overridden.
absl::StatusOr<TransactionDb> ParseDb(std::istream& in,
                                      std::optional<uint32_t> d = std::nullopt);
absl::StatusOr<TransactionDb> LoadDb(const std::string& path,
                                     std::optional<uint32_t> d = std::nullopt);
void WriteDb(const TransactionDb& db, std::ostream& out);

struct SyntheticParams {
  uint32_t n = 100000;
  uint32_t d = 256;
  double zipf_exponent = 1.1;
  double mean_len = 4.0;
  uint32_t max_len = 0;  // 0: no cap beyond d.
  uint64_t seed = 1;
};

// Lengths follow a Poisson(mean_len) clamped to [1, min(max_len, d)]; items
// are drawn without replacement from Zipf(exponent) over [0, d), item 0
// being the most popular.
absl::StatusOr<TransactionDb> GenerateSynthetic(const SyntheticParams& params);

std::vector<double> TrueItemFrequencies(const TransactionDb& db);
std::vector<double> TrueItemsetFrequencies(
    const TransactionDb& db, std::span<const ItemsetKey> candidates);

// Smallest length L with P[|S_j| <= L] >= percentile.
uint32_t LengthPercentile(const TransactionDb& db, double percentile);

// Exact k most frequent itemsets of any size. Ranked by frequency
// descending, ties by ascending key.
std::vector<std::pair<ItemsetKey, double>> TopKItemsets(
    const TransactionDb& db, uint32_t k);

// The k most frequent items, ties by ascending index.
std::vector<uint32_t> TopKItems(std::span<const double> freqs, uint32_t k);

// The elements a protocol phase reports on: the full item domain, a
// candidate item list, or a candidate itemset list. Elements are addressed
// by their position in the list.
class ElementDomain {
 public:
  static ElementDomain AllItems(uint32_t d);
  static ElementDomain Items(uint32_t d, std::vector<uint32_t> items);
  static ElementDomain Itemsets(std::vector<ItemsetKey> itemsets);

  uint32_t size() const { return size_; }
  bool is_itemsets() const { return !itemsets_.empty(); }
  const std::vector<uint32_t>& items() const { return items_; }
  const std::vector<ItemsetKey>& itemsets() const { return itemsets_; }

  // Positions of the elements contained in `tx`, ascending.
  void Held(std::span<const uint32_t> tx, std::vector<uint32_t>& out) const;

 private:
  uint32_t size_ = 0;
  bool all_items_ = false;
  std::vector<uint32_t> items_;
  std::vector<int32_t> position_;  // item -> position or -1.
  std::vector<ItemsetKey> itemsets_;
};

// Pads `held` with dummies domain_size, domain_size + 1, ... up to l
// elements and returns one uniformly. When |held| >= l a uniform element of
// `held` is returned.
uint32_t PadAndSample(std::span<const uint32_t> held, uint32_t l,
                      uint32_t domain_size, Rng& rng);

// Set-valued counterpart: a uniform l-subset of `held`, or `held` plus
// dummies when it is shorter than l.
std::vector<uint32_t> PadTo(std::span<const uint32_t> held, uint32_t l,
                            uint32_t domain_size, Rng& rng);

}  // namespace ldpfim

#endif  // LDPFIM_DATASET_H_
