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

#include "ldpfim/dataset.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace ldpfim {

absl::StatusOr<TransactionDb> TransactionDb::Create(
    uint32_t d, std::vector<std::vector<uint32_t>> transactions) {
  if (transactions.empty()) {
    return absl::InvalidArgumentError("database has no transactions");
  }
  if (d < 1) return absl::InvalidArgumentError("item domain is empty");
  TransactionDb db;
  db.d_ = d;
  db.offsets_.reserve(transactions.size() + 1);
  for (size_t j = 0; j < transactions.size(); ++j) {
    std::vector<uint32_t>& tx = transactions[j];
    std::sort(tx.begin(), tx.end());
    tx.erase(std::unique(tx.begin(), tx.end()), tx.end());
    if (!tx.empty() && tx.back() >= d) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "transaction %d holds item %d outside domain %d", j, tx.back(), d));
    }
    db.items_.insert(db.items_.end(), tx.begin(), tx.end());
    db.offsets_.push_back(db.items_.size());
  }
  return db;
}

absl::StatusOr<ItemsetKey> ItemsetKey::Create(std::vector<uint32_t> items) {
  if (items.empty()) return absl::InvalidArgumentError("empty itemset");
  std::sort(items.begin(), items.end());
  if (std::adjacent_find(items.begin(), items.end()) != items.end()) {
    return absl::InvalidArgumentError("itemset has duplicate items");
  }
  return ItemsetKey(std::move(items));
}

ItemsetKey ItemsetKey::FromSortedUnchecked(std::vector<uint32_t> items) {
  return ItemsetKey(std::move(items));
}

std::string ItemsetKey::ToString() const { return absl::StrJoin(items_, " "); }

absl::StatusOr<TransactionDb> ParseDb(std::istream& in,
                                      std::optional<uint32_t> d) {
  std::vector<std::vector<uint32_t>> txs;
  std::string line;
  uint32_t max_item = 0;
  bool any_item = false;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    std::vector<uint32_t> tx;
    for (absl::string_view tok :
         absl::StrSplit(line, absl::ByAnyChar(" \t\r"), absl::SkipEmpty())) {
      uint32_t item;
      if (!absl::SimpleAtoi(tok, &item)) {
        return absl::InvalidArgumentError(
            absl::StrFormat("line %d: bad item token '%s'", line_no, tok));
      }
      tx.push_back(item);
      max_item = std::max(max_item, item);
      any_item = true;
    }
    if (!tx.empty()) txs.push_back(std::move(tx));
  }
  if (txs.empty()) return absl::InvalidArgumentError("no transactions in input");
  const uint32_t domain = d.value_or(any_item ? max_item + 1 : 1);
  return TransactionDb::Create(std::max<uint32_t>(domain, 1), std::move(txs));
}

absl::StatusOr<TransactionDb> LoadDb(const std::string& path,
                                     std::optional<uint32_t> d) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrFormat("cannot open %s", path));
  absl::StatusOr<TransactionDb> db = ParseDb(in, d);
  if (!db.ok()) {
    return absl::Status(db.status().code(),
                        absl::StrCat(path, ": ", db.status().message()));
  }
  return db;
}

void WriteDb(const TransactionDb& db, std::ostream& out) {
  for (uint32_t j = 0; j < db.n(); ++j) {
    out << absl::StrJoin(db.transaction(j), " ") << '\n';
  }
}

absl::StatusOr<TransactionDb> GenerateSynthetic(const SyntheticParams& p) {
  if (p.n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (p.d < 2) return absl::InvalidArgumentError("d must be >= 2");
  if (!(p.zipf_exponent > 0)) {
    return absl::InvalidArgumentError("zipf exponent must be positive");
  }
  if (!(p.mean_len >= 1) || p.mean_len > p.d) {
    return absl::InvalidArgumentError("mean length must lie in [1, d]");
  }
  const uint32_t cap = p.max_len == 0 ? p.d : std::min(p.max_len, p.d);

  std::vector<double> zipf_cdf(p.d);
  double acc = 0;
  for (uint32_t r = 0; r < p.d; ++r) {
    acc += std::pow(r + 1.0, -p.zipf_exponent);
    zipf_cdf[r] = acc;
  }
  for (double& c : zipf_cdf) c /= acc;
  zipf_cdf.back() = 1.0;

  std::vector<double> len_cdf(cap + 1, 0.0);
  {
    double pmf = std::exp(-p.mean_len);
    double c = pmf;
    for (uint32_t k = 1; k <= cap; ++k) {
      pmf *= p.mean_len / k;
      c += pmf;
      len_cdf[k] = c;
    }
    // Mass of 0 folds into length 1, mass above the cap into the cap.
    len_cdf[cap] = 1.0;
  }

  Rng root(p.seed);
  std::vector<std::vector<uint32_t>> txs(p.n);
  std::vector<char> chosen(p.d, 0);
  for (uint32_t j = 0; j < p.n; ++j) {
    Rng rng = root.Child(j);
    const double u = rng.Uniform();
    uint32_t len = static_cast<uint32_t>(
        std::upper_bound(len_cdf.begin() + 1, len_cdf.end(), u) -
        len_cdf.begin());
    len = std::clamp<uint32_t>(len, 1, cap);
    std::vector<uint32_t>& tx = txs[j];
    tx.reserve(len);
    uint64_t attempts = 0;
    while (tx.size() < len) {
      uint32_t item;
      if (++attempts > 64ull * p.d) {
        // Heavy-tail rejection stalls on near-full rows; fill uniformly.
        do {
          item = static_cast<uint32_t>(rng.UniformInt(p.d));
        } while (chosen[item]);
      } else {
        item = static_cast<uint32_t>(
            std::lower_bound(zipf_cdf.begin(), zipf_cdf.end(), rng.Uniform()) -
            zipf_cdf.begin());
        item = std::min(item, p.d - 1);
        if (chosen[item]) continue;
      }
      chosen[item] = 1;
      tx.push_back(item);
    }
    for (uint32_t item : tx) chosen[item] = 0;
  }
  return TransactionDb::Create(p.d, std::move(txs));
}

std::vector<double> TrueItemFrequencies(const TransactionDb& db) {
  std::vector<uint64_t> counts(db.d(), 0);
  for (uint32_t j = 0; j < db.n(); ++j) {
    for (uint32_t item : db.transaction(j)) ++counts[item];
  }
  std::vector<double> freqs(db.d());
  for (uint32_t t = 0; t < db.d(); ++t) {
    freqs[t] = static_cast<double>(counts[t]) / db.n();
  }
  return freqs;
}

std::vector<double> TrueItemsetFrequencies(
    const TransactionDb& db, std::span<const ItemsetKey> candidates) {
  std::vector<uint64_t> counts(candidates.size(), 0);
  for (uint32_t j = 0; j < db.n(); ++j) {
    std::span<const uint32_t> tx = db.transaction(j);
    for (size_t c = 0; c < candidates.size(); ++c) {
      const auto& items = candidates[c].items();
      counts[c] += std::includes(tx.begin(), tx.end(), items.begin(),
                                 items.end());
    }
  }
  std::vector<double> freqs(candidates.size());
  for (size_t c = 0; c < candidates.size(); ++c) {
    freqs[c] = static_cast<double>(counts[c]) / db.n();
  }
  return freqs;
}

uint32_t LengthPercentile(const TransactionDb& db, double percentile) {
  std::vector<uint64_t> hist(db.d() + 1, 0);
  for (uint32_t j = 0; j < db.n(); ++j) ++hist[db.transaction(j).size()];
  uint64_t acc = 0;
  for (uint32_t len = 0; len <= db.d(); ++len) {
    acc += hist[len];
    if (static_cast<double>(acc) >= (percentile - 1e-9) * db.n()) {
      return std::max<uint32_t>(len, 1);
    }
  }
  return db.d();
}

namespace {

using Tidset = std::vector<uint64_t>;

void Intersect(Tidset& acc, const Tidset& other) {
  for (size_t w = 0; w < acc.size(); ++w) acc[w] &= other[w];
}

uint64_t Popcount(const Tidset& t) {
  uint64_t c = 0;
  for (uint64_t w : t) c += std::popcount(w);
  return c;
}

}  // namespace

std::vector<std::pair<ItemsetKey, double>> TopKItemsets(
    const TransactionDb& db, uint32_t k) {
  const size_t words = (db.n() + 63) / 64;
  std::vector<Tidset> tids(db.d(), Tidset(words, 0));
  for (uint32_t j = 0; j < db.n(); ++j) {
    for (uint32_t item : db.transaction(j)) {
      tids[item][j >> 6] |= uint64_t{1} << (j & 63);
    }
  }
  // Children extend only by larger items, so every itemset has one parent
  // whose support is no smaller and whose key is lexicographically smaller;
  // best-first popping therefore yields the exact ranking.
  struct Node {
    uint64_t count;
    std::vector<uint32_t> items;
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.count != b.count) return a.count < b.count;
    return a.items > b.items;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> frontier(worse);
  for (uint32_t t = 0; t < db.d(); ++t) {
    const uint64_t c = Popcount(tids[t]);
    if (c > 0) frontier.push({c, {t}});
  }
  std::vector<std::pair<ItemsetKey, double>> out;
  Tidset acc;
  while (out.size() < k && !frontier.empty()) {
    Node node = frontier.top();
    frontier.pop();
    acc = tids[node.items[0]];
    for (size_t i = 1; i < node.items.size(); ++i) Intersect(acc, tids[node.items[i]]);
    for (uint32_t t = node.items.back() + 1; t < db.d(); ++t) {
      uint64_t c = 0;
      const Tidset& other = tids[t];
      for (size_t w = 0; w < words; ++w) c += std::popcount(acc[w] & other[w]);
      if (c == 0) continue;
      std::vector<uint32_t> child = node.items;
      child.push_back(t);
      frontier.push({c, std::move(child)});
    }
    out.emplace_back(ItemsetKey::FromSortedUnchecked(std::move(node.items)),
                     static_cast<double>(node.count) / db.n());
  }
  return out;
}

std::vector<uint32_t> TopKItems(std::span<const double> freqs, uint32_t k) {
  std::vector<uint32_t> order(freqs.size());
  std::iota(order.begin(), order.end(), 0);
  const size_t kk = std::min<size_t>(k, order.size());
  std::partial_sort(order.begin(), order.begin() + kk, order.end(),
                    [&](uint32_t a, uint32_t b) {
                      if (freqs[a] != freqs[b]) return freqs[a] > freqs[b];
                      return a < b;
                    });
  order.resize(kk);
  return order;
}

ElementDomain ElementDomain::AllItems(uint32_t d) {
  ElementDomain dom;
  dom.size_ = d;
  dom.all_items_ = true;
  return dom;
}

ElementDomain ElementDomain::Items(uint32_t d, std::vector<uint32_t> items) {
  ElementDomain dom;
  dom.size_ = static_cast<uint32_t>(items.size());
  dom.position_.assign(d, -1);
  for (size_t i = 0; i < items.size(); ++i) {
    dom.position_[items[i]] = static_cast<int32_t>(i);
  }
  dom.items_ = std::move(items);
  return dom;
}

ElementDomain ElementDomain::Itemsets(std::vector<ItemsetKey> itemsets) {
  ElementDomain dom;
  dom.size_ = static_cast<uint32_t>(itemsets.size());
  dom.itemsets_ = std::move(itemsets);
  return dom;
}

void ElementDomain::Held(std::span<const uint32_t> tx,
                         std::vector<uint32_t>& out) const {
  out.clear();
  if (all_items_) {
    out.assign(tx.begin(), tx.end());
  } else if (!itemsets_.empty()) {
    for (uint32_t c = 0; c < size_; ++c) {
      const auto& items = itemsets_[c].items();
      if (std::includes(tx.begin(), tx.end(), items.begin(), items.end())) {
        out.push_back(c);
      }
    }
  } else {
    for (uint32_t item : tx) {
      if (item < position_.size() && position_[item] >= 0) {
        out.push_back(static_cast<uint32_t>(position_[item]));
      }
    }
    std::sort(out.begin(), out.end());
  }
}

uint32_t PadAndSample(std::span<const uint32_t> held, uint32_t l,
                      uint32_t domain_size, Rng& rng) {
  const uint32_t s = static_cast<uint32_t>(held.size());
  if (s >= l) {
    return held[rng.UniformInt(s)];
  }
  const uint32_t r = static_cast<uint32_t>(rng.UniformInt(l));
  return r < s ? held[r] : domain_size + (r - s);
}

std::vector<uint32_t> PadTo(std::span<const uint32_t> held, uint32_t l,
                            uint32_t domain_size, Rng& rng) {
  std::vector<uint32_t> out(held.begin(), held.end());
  if (out.size() >= l) {
    for (uint32_t i = 0; i < l; ++i) {
      std::swap(out[i], out[i + rng.UniformInt(out.size() - i)]);
    }
    out.resize(l);
  } else {
    for (uint32_t dummy = 0; out.size() < l; ++dummy) {
      out.push_back(domain_size + dummy);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ldpfim
