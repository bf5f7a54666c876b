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

#include "ldpfim/defense.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ldpfim/frequency_oracle.h"
#include "ldpfim/random.h"

namespace ldpfim {
namespace {

TEST(DefenseParseTest, RoundTrip) {
  for (const char* text : {"NONE", "FILTER_FO", "FILTER_FO:4.5", "RAND_K",
                           "RAND_K:40", "REPLACE_FO", "CRYPTO_FO"}) {
    auto d = ParseDefense(text);
    ASSERT_TRUE(d.ok()) << text;
    EXPECT_EQ(DefenseName(*d), text);
  }
  EXPECT_FALSE(ParseDefense("FILTER_FO:x").ok());
  EXPECT_FALSE(ParseDefense("REPLACE_FO:3").ok());
  EXPECT_FALSE(ParseDefense("SHIELD").ok());
}

TEST(FilterTest, GrrNeverDropped) {
  FOConfig cfg = *MakeConfig(FOKind::kGrr, 2.0, 10);
  std::vector<EncodedReport> reports(50, GrrReport{3});
  FilterOutcome out = FilterReports(cfg, 1.0, reports);
  EXPECT_EQ(out.dropped, 0u);
  EXPECT_EQ(out.kept.size(), 50u);
}

TEST(FilterTest, FullRapporDropped) {
  FOConfig cfg = *MakeConfig(FOKind::kRappor, 2.0, 6);
  BitVector all(6);
  for (uint32_t i = 0; i < 6; ++i) all.Set(i);
  BitVector one(6);
  one.Set(1);
  FilterOutcome out = FilterReports(cfg, 3.0, {all, one});
  EXPECT_EQ(out.dropped, 1u);
  ASSERT_EQ(out.kept.size(), 1u);
  EXPECT_EQ(std::get<BitVector>(out.kept[0]), one);
}

TEST(FprTest, BeyondDomainIsZero) {
  FOConfig olh = *MakeConfig(FOKind::kOlh, 4.0, 64);
  EXPECT_DOUBLE_EQ(Fpr(FOKind::kOlh, 65, 64, olh), 0.0);
  FOConfig rappor = *MakeConfig(FOKind::kRappor, 4.0, 64);
  EXPECT_DOUBLE_EQ(Fpr(FOKind::kRappor, 64, 64, rappor), 0.0);
  FOConfig grr = *MakeConfig(FOKind::kGrr, 4.0, 64);
  EXPECT_DOUBLE_EQ(Fpr(FOKind::kGrr, 1, 64, grr), 0.0);
}

TEST(FprTest, AveragedTailsBinaryHash) {
  // X ~ Bin(1, 1/2); a report is dropped when its support reaches 2.
  FOConfig cfg = *MakeConfig(FOKind::kSh, 1.0, 2);
  EXPECT_NEAR(Fpr(FOKind::kSh, 1.0, 2, cfg), (0.5 + 0.0) / 2, 1e-12);
  EXPECT_NEAR(Fpr(FOKind::kSh, 0.0, 2, cfg), (1.0 + 0.5) / 2, 1e-12);
}

TEST(FprTest, MonotoneInTheta) {
  FOConfig olh = *MakeConfig(FOKind::kOlh, 2.0, 128);
  FOConfig rappor = *MakeConfig(FOKind::kRappor, 2.0, 128);
  double prev_o = 1, prev_r = 1;
  for (double theta = 0; theta <= 130; theta += 0.5) {
    const double o = Fpr(FOKind::kOlh, theta, 128, olh);
    const double r = Fpr(FOKind::kRappor, theta, 128, rappor);
    EXPECT_LE(o, prev_o + 1e-15);
    EXPECT_LE(r, prev_r + 1e-15);
    EXPECT_GE(o, 0);
    EXPECT_LE(r, 1);
    prev_o = o;
    prev_r = r;
  }
}

TEST(FprTest, RapporMatchesMonteCarlo) {
  const uint32_t d = 40;
  FOConfig cfg = *MakeConfig(FOKind::kRappor, 2.0, d);
  const double theta = DefaultFilterTheta(cfg);
  Rng rng(12);
  std::vector<EncodedReport> reports;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) reports.push_back(*Perturb(cfg, i % d, rng));
  const double rate =
      static_cast<double>(FilterReports(cfg, theta, reports).dropped) / trials;
  const double f = Fpr(FOKind::kRappor, theta, d, cfg);
  EXPECT_NEAR(rate, f, 3 * std::sqrt(f * (1 - f) / trials) + 1e-9);
}

TEST(BinomialTailTest, Values) {
  EXPECT_DOUBLE_EQ(BinomialTail(4, 0.5, 0), 1.0);
  EXPECT_NEAR(BinomialTail(4, 0.5, 3), 5.0 / 16, 1e-12);
  EXPECT_DOUBLE_EQ(BinomialTail(4, 0.5, 5), 0.0);
}

TEST(RapporSupportTest, Expected) {
  EXPECT_DOUBLE_EQ(RapporExpectedSupport(6, 0.25), 2.0);
}

TEST(ApplyDefenseTest, Switches) {
  MiningConfig base;
  base.k = 8;
  Rng rng(1);
  Defense filter{DefenseKind::kFilterFo, 3.0, 0};
  auto f = ApplyDefense(filter, base, rng);
  ASSERT_TRUE(f.ok());
  EXPECT_TRUE(f->filter);
  EXPECT_EQ(f->filter_theta, 3.0);
  EXPECT_TRUE(ApplyDefense({DefenseKind::kReplaceFo}, base, rng)->force_grr);
  EXPECT_TRUE(ApplyDefense({DefenseKind::kCryptoFo}, base, rng)->input_only);
  auto none = ApplyDefense({}, base, rng);
  EXPECT_FALSE(none->filter || none->force_grr || none->input_only);
}

TEST(ApplyDefenseTest, RandKRange) {
  MiningConfig base;
  base.k = 8;
  Rng rng(3);
  Defense tight{DefenseKind::kRandK, std::nullopt, 9};
  for (int i = 0; i < 20; ++i) {
    auto c = ApplyDefense(tight, base, rng);
    ASSERT_TRUE(c.ok());
    EXPECT_EQ(c->k, 9u);
    EXPECT_EQ(c->AdvertisedK(), 8u);
  }
  Defense wide{DefenseKind::kRandK};
  for (int i = 0; i < 50; ++i) {
    auto c = ApplyDefense(wide, base, rng);
    ASSERT_TRUE(c.ok());
    EXPECT_GT(c->k, 8u);
    EXPECT_LE(c->k, 16u);
  }
  Defense bad{DefenseKind::kRandK, std::nullopt, 8};
  EXPECT_FALSE(ApplyDefense(bad, base, rng).ok());
}

}  // namespace
}  // namespace ldpfim
