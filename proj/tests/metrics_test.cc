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

#include <vector>

#include <gtest/gtest.h>

#include "ldpfim/dataset.h"

namespace ldpfim {
namespace {

std::vector<ItemsetKey> Keys(std::vector<uint32_t> items) {
  std::vector<ItemsetKey> out;
  for (uint32_t i : items) out.push_back(ItemsetKey::FromSortedUnchecked({i}));
  return out;
}

TEST(AccTest, Examples) {
  RankedTruth truth(Keys({1, 2, 3}));
  EXPECT_NEAR(*Acc(truth, Keys({1, 2, 4})), 2.0 / 3, 1e-12);
  EXPECT_DOUBLE_EQ(*Acc(truth, Keys({3, 1, 2})), 1.0);
  EXPECT_DOUBLE_EQ(*Acc(truth, Keys({7, 8, 9})), 0.0);
}

TEST(AccTest, SizeMismatch) {
  RankedTruth truth(Keys({1, 2, 3}));
  EXPECT_FALSE(Acc(truth, Keys({1, 2})).ok());
  EXPECT_FALSE(Ncr(truth, Keys({1, 2, 3, 4})).ok());
}

TEST(NcrTest, Examples) {
  RankedTruth truth(Keys({1, 2, 3}));
  EXPECT_DOUBLE_EQ(*Ncr(truth, Keys({1, 2, 3})), 1.0);
  EXPECT_DOUBLE_EQ(*Ncr(truth, Keys({4, 5, 6})), 0.0);
  EXPECT_DOUBLE_EQ(*Ncr(truth, Keys({1, 5, 6})), 0.5);
  EXPECT_DOUBLE_EQ(*Ncr(truth, Keys({3, 5, 6})), 1.0 / 6);
}

TEST(NcrTest, Weights) {
  RankedTruth truth(Keys({4, 9}));
  EXPECT_EQ(truth.Weight(Keys({4})[0]), 2u);
  EXPECT_EQ(truth.Weight(Keys({9})[0]), 1u);
  EXPECT_EQ(truth.Weight(Keys({5})[0]), 0u);
}

TEST(NcrTest, BoundedProperty) {
  RankedTruth truth(Keys({0, 1, 2, 3, 4}));
  for (uint32_t a = 0; a < 8; ++a) {
    for (uint32_t b = a + 1; b < 9; ++b) {
      auto mined = Keys({a, b, 10, 11, 12});
      const double acc = *Acc(truth, mined);
      const double ncr = *Ncr(truth, mined);
      EXPECT_GE(ncr, 0);
      EXPECT_LE(ncr, 1);
      EXPECT_EQ(acc == 0, ncr == 0);
    }
  }
}

TEST(DuplicatesTest, CountedOnce) {
  RankedTruth truth(Keys({1, 2}));
  EXPECT_DOUBLE_EQ(*Acc(truth, Keys({1, 1})), 0.5);
}

TEST(DropRatioTest, Examples) {
  EXPECT_NEAR(*DropRatio(0.8, 0.2), 0.75, 1e-12);
  EXPECT_NEAR(*DropRatio(0.5, 0.5), 0.0, 1e-12);
  EXPECT_NEAR(*DropRatio(0.82, 0.23), 0.7195, 1e-4);
  EXPECT_LT(*DropRatio(0.5, 0.6), 0);
  EXPECT_FALSE(DropRatio(0.0, 0.1).ok());
}

}  // namespace
}  // namespace ldpfim
