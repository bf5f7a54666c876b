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

#include "ldpfim/mining.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "ldpfim/dataset.h"
#include "ldpfim/frequency_oracle.h"
#include "ldpfim/metrics.h"
#include "ldpfim/random.h"

namespace ldpfim {
namespace {

// Single-item transactions with well separated item counts.
TransactionDb SeparatedDb(uint32_t d, uint32_t n) {
  std::vector<double> w(d);
  double total = 0;
  for (uint32_t i = 0; i < d; ++i) total += w[i] = std::pow(d - i, 2.0);
  std::vector<std::vector<uint32_t>> txs;
  for (uint32_t i = 0; i < d; ++i) {
    const uint32_t c = static_cast<uint32_t>(std::round(n * w[i] / total));
    for (uint32_t j = 0; j < c; ++j) txs.push_back({i});
  }
  // Interleave so that any user split sees the same mixture.
  std::vector<std::vector<uint32_t>> mixed(txs.size());
  Rng rng(3);
  std::vector<uint32_t> order(txs.size());
  for (uint32_t j = 0; j < order.size(); ++j) order[j] = j;
  std::shuffle(order.begin(), order.end(), rng);
  for (uint32_t j = 0; j < order.size(); ++j) mixed[j] = txs[order[j]];
  return *TransactionDb::Create(d, std::move(mixed));
}

std::vector<ItemsetKey> Singletons(std::vector<uint32_t> items) {
  std::vector<ItemsetKey> out;
  for (uint32_t i : items) out.push_back(ItemsetKey::FromSortedUnchecked({i}));
  return out;
}

TEST(ChooseFoTest, ThresholdExamples) {
  const double eps = std::log(3.0);
  EXPECT_EQ(ChooseFo(20, 1, eps), FOKind::kOlh);
  EXPECT_EQ(ChooseFo(5, 1, eps), FOKind::kGrr);
  EXPECT_EQ(ChooseFo(64, 3, eps), FOKind::kGrr);
  EXPECT_EQ(ChooseFo(101, 3, eps), FOKind::kOlh);
}

TEST(PaddingLengthTest, NoiselessConstant) {
  FOConfig cfg = MakeNoiselessConfig(FOKind::kGrr, 10);
  std::vector<EncodedReport> reports(100, GrrReport{2});
  auto l = EstimatePaddingLength(cfg, reports, 0.9);
  ASSERT_TRUE(l.ok());
  EXPECT_EQ(*l, 3u);
}

TEST(PaddingLengthTest, NoiselessUniform) {
  FOConfig cfg = MakeNoiselessConfig(FOKind::kGrr, 10);
  std::vector<EncodedReport> reports;
  for (uint32_t v = 0; v < 10; ++v) {
    for (int r = 0; r < 10; ++r) reports.push_back(GrrReport{v});
  }
  auto l = EstimatePaddingLength(cfg, reports, 0.9);
  ASSERT_TRUE(l.ok());
  EXPECT_EQ(*l, 9u);
}

TEST(SvsmGuessTest, PairFormula) {
  const std::vector<std::pair<uint32_t, double>> items = {{0, 0.5}, {1, 0.4}};
  auto g = SvsmGuessCandidates(items, 3);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0].first, ItemsetKey::FromSortedUnchecked({0}));
  EXPECT_NEAR(g[0].second, 0.9, 1e-12);
  EXPECT_NEAR(g[1].second, 0.72, 1e-12);
  EXPECT_EQ(g[2].first, ItemsetKey::FromSortedUnchecked({0, 1}));
  EXPECT_NEAR(g[2].second, 0.648, 1e-12);
}

TEST(SvsmGuessTest, ReturnsAllWhenShort) {
  const std::vector<std::pair<uint32_t, double>> items = {{3, 0.2}, {7, 0.1}};
  EXPECT_EQ(SvsmGuessCandidates(items, 10).size(), 3u);
}

TEST(SvsmGuessTest, MatchesBruteForce) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const uint32_t k = 1 + rng.UniformInt(8);
    std::vector<std::pair<uint32_t, double>> items;
    for (uint32_t i = 0; i < k; ++i) {
      items.emplace_back(10 * i + rng.UniformInt(10), 0.01 + rng.Uniform());
    }
    double fmax = 0;
    for (auto& [i, f] : items) fmax = std::max(fmax, f);
    std::vector<std::pair<ItemsetKey, double>> all;
    for (uint32_t mask = 1; mask < (1u << k); ++mask) {
      std::vector<uint32_t> key;
      double guess = 1;
      for (uint32_t b = 0; b < k; ++b) {
        if (mask >> b & 1) {
          key.push_back(items[b].first);
          guess *= 0.9 * items[b].second / fmax;
        }
      }
      std::sort(key.begin(), key.end());
      all.emplace_back(ItemsetKey::FromSortedUnchecked(key), guess);
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      return a.second > b.second;
    });
    const uint32_t want = std::min<uint32_t>(2 * k, all.size());
    auto got = SvsmGuessCandidates(items, want);
    ASSERT_EQ(got.size(), want);
    for (uint32_t r = 0; r < want; ++r) {
      EXPECT_EQ(got[r].first, all[r].first) << "seed " << seed << " rank " << r;
      EXPECT_NEAR(got[r].second, all[r].second, 1e-12);
    }
  }
}

class NoiselessTest : public ::testing::TestWithParam<ProtocolKind> {};

TEST_P(NoiselessTest, RecoversTrueTopK) {
  const ProtocolKind kind = GetParam();
  TransactionDb db = SeparatedDb(24, 30000);
  MiningConfig cfg;
  cfg.k = 4;
  cfg.epsilon = 40;
  auto result = RunProtocol(kind, db, cfg, {}, nullptr, Rng(11));
  ASSERT_TRUE(result.ok()) << result.status();
  std::vector<ItemsetKey> want = Singletons({0, 1, 2, 3});
  ASSERT_EQ(result->topk.size(), 4u);
  std::vector<ItemsetKey> got = result->topk;
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, want);
}

INSTANTIATE_TEST_SUITE_P(
    AllProtocols, NoiselessTest,
    ::testing::Values(ProtocolKind::kLdpMiner, ProtocolKind::kSvim,
                      ProtocolKind::kSvsm, ProtocolKind::kFimlI,
                      ProtocolKind::kFimlIs, ProtocolKind::kPrivSetTopK),
    [](const auto& info) { return std::string(ProtocolName(info.param)); });

TEST(RunProtocolTest, SvimAuditShape) {
  SyntheticParams p;
  p.n = 30000;
  p.d = 128;
  auto db = GenerateSynthetic(p);
  ASSERT_TRUE(db.ok());
  MiningConfig cfg;
  cfg.k = 8;
  auto result = RunProtocol(ProtocolKind::kSvim, *db, cfg, {}, nullptr, Rng(1));
  ASSERT_TRUE(result.ok());
  ASSERT_EQ(result->audit.size(), 3u);
  EXPECT_EQ(result->audit[0].phase, Phase::kPrune);
  EXPECT_EQ(result->audit[1].phase, Phase::kLength);
  EXPECT_EQ(result->audit[2].phase, Phase::kSelect);
  EXPECT_EQ(result->audit[2].candidates, 16u);
  uint32_t users = 0;
  for (const PhaseAudit& a : result->audit) users += a.benign_reports;
  EXPECT_EQ(users, p.n);
  // Output is drawn from the final round's candidates.
  for (const ItemsetKey& x : result->topk) {
    EXPECT_NE(std::find(result->candidates.begin(), result->candidates.end(), x),
              result->candidates.end());
  }
}

TEST(RunProtocolTest, LdpMinerOracles) {
  SyntheticParams p;
  p.n = 20000;
  p.d = 64;
  auto db = GenerateSynthetic(p);
  ASSERT_TRUE(db.ok());
  MiningConfig cfg;
  cfg.k = 4;
  auto result =
      RunProtocol(ProtocolKind::kLdpMiner, *db, cfg, {}, nullptr, Rng(1));
  ASSERT_TRUE(result.ok());
  ASSERT_EQ(result->audit.size(), 2u);
  EXPECT_EQ(result->audit[0].fo, FOKind::kSh);
  EXPECT_EQ(result->audit[1].fo, FOKind::kRappor);
  EXPECT_NEAR(result->audit[0].epsilon + result->audit[1].epsilon, 4.0, 1e-12);
}

TEST(RunProtocolTest, Deterministic) {
  SyntheticParams p;
  p.n = 20000;
  p.d = 64;
  auto db = GenerateSynthetic(p);
  ASSERT_TRUE(db.ok());
  MiningConfig cfg;
  cfg.k = 6;
  for (ProtocolKind kind : {ProtocolKind::kSvim, ProtocolKind::kFimlIs}) {
    auto a = RunProtocol(kind, *db, cfg, {}, nullptr, Rng(5));
    auto b = RunProtocol(kind, *db, cfg, {}, nullptr, Rng(5));
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_EQ(a->topk, b->topk);
    EXPECT_EQ(a->estimates, b->estimates);
  }
}

TEST(RunProtocolTest, TooFewUsers) {
  auto db = TransactionDb::Create(10, {{1}, {2}});
  ASSERT_TRUE(db.ok());
  MiningConfig cfg;
  cfg.k = 2;
  EXPECT_FALSE(
      RunProtocol(ProtocolKind::kSvim, *db, cfg, {}, nullptr, Rng(1)).ok());
}

TEST(RunProtocolTest, CorruptedFlagsMustMatch) {
  TransactionDb db = SeparatedDb(24, 3000);
  MiningConfig cfg;
  cfg.k = 4;
  std::vector<uint8_t> flags(db.n() - 1, 0);
  EXPECT_FALSE(
      RunProtocol(ProtocolKind::kSvim, db, cfg, flags, nullptr, Rng(1)).ok());
}

// Returns reports of the wrong alternative.
class WrongShapeHook : public AdversaryHook {
 public:
  absl::StatusOr<PhaseResponse> Respond(const PhaseContext& ctx) override {
    PhaseResponse r;
    r.mode = PhaseResponse::Mode::kReports;
    r.reports.assign(ctx.corrupted_users.size(), SetReport{{0}});
    return r;
  }
};

// Returns one report too many.
class TooManyHook : public AdversaryHook {
 public:
  absl::StatusOr<PhaseResponse> Respond(const PhaseContext& ctx) override {
    PhaseResponse r;
    r.mode = PhaseResponse::Mode::kReports;
    r.reports.assign(ctx.corrupted_users.size() + 1, GrrReport{0});
    return r;
  }
};

TEST(RunProtocolTest, AdversaryContractViolations) {
  TransactionDb db = SeparatedDb(24, 3000);
  MiningConfig cfg;
  cfg.k = 4;
  std::vector<uint8_t> flags(db.n(), 0);
  for (uint32_t u = 0; u < db.n(); u += 20) flags[u] = 1;
  WrongShapeHook wrong;
  EXPECT_FALSE(
      RunProtocol(ProtocolKind::kSvim, db, cfg, flags, &wrong, Rng(1)).ok());
  TooManyHook many;
  EXPECT_FALSE(
      RunProtocol(ProtocolKind::kSvim, db, cfg, flags, &many, Rng(1)).ok());
}

// Forwards the first round's context to the test.
class RecordingHook : public AdversaryHook {
 public:
  absl::StatusOr<PhaseResponse> Respond(const PhaseContext& ctx) override {
    phases.push_back(ctx.phase);
    benign += ctx.benign_users.size();
    corrupted += ctx.corrupted_users.size();
    EXPECT_EQ(ctx.benign_reports.size(), ctx.benign_users.size());
    return PhaseResponse{};
  }
  std::vector<Phase> phases;
  size_t benign = 0;
  size_t corrupted = 0;
};

TEST(RunProtocolTest, HookSeesEveryRound) {
  TransactionDb db = SeparatedDb(24, 3000);
  MiningConfig cfg;
  cfg.k = 4;
  std::vector<uint8_t> flags(db.n(), 0);
  size_t m = 0;
  for (uint32_t u = 0; u < db.n(); u += 10) flags[u] = 1, ++m;
  RecordingHook hook;
  auto result = RunProtocol(ProtocolKind::kFimlI, db, cfg, flags, &hook, Rng(2));
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(hook.phases,
            (std::vector<Phase>{Phase::kPrune, Phase::kMembership}));
  EXPECT_EQ(hook.corrupted, m);
  EXPECT_EQ(hook.benign + hook.corrupted, db.n());
}

TEST(RunProtocolTest, FimlCandidateCeiling) {
  SyntheticParams p;
  p.n = 20000;
  p.d = 64;
  auto db = GenerateSynthetic(p);
  ASSERT_TRUE(db.ok());
  MiningConfig cfg;
  cfg.k = 8;
  cfg.epsilon = 1.0;
  std::vector<ItemsetKey> truth =
      Singletons(TopKItems(TrueItemFrequencies(*db), cfg.k));
  RankedTruth ranked(truth);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    auto result =
        RunProtocol(ProtocolKind::kFimlI, *db, cfg, {}, nullptr, Rng(seed));
    ASSERT_TRUE(result.ok());
    uint32_t in_candidates = 0;
    for (const ItemsetKey& x : truth) {
      in_candidates += std::count(result->candidates.begin(),
                                  result->candidates.end(), x);
    }
    auto acc = Acc(ranked, result->topk);
    ASSERT_TRUE(acc.ok());
    EXPECT_LE(*acc * cfg.k, in_candidates + 1e-9);
  }
}

TEST(RunProtocolTest, SvimBaselineUtility) {
  SyntheticParams p;
  auto db = GenerateSynthetic(p);
  ASSERT_TRUE(db.ok());
  MiningConfig cfg;
  RankedTruth truth(Singletons(TopKItems(TrueItemFrequencies(*db), cfg.k)));
  double mean = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto result =
        RunProtocol(ProtocolKind::kSvim, *db, cfg, {}, nullptr, Rng(seed));
    ASSERT_TRUE(result.ok());
    mean += *Acc(truth, result->topk) / 10;
  }
  EXPECT_GE(mean, 0.8);
}

}  // namespace
}  // namespace ldpfim
