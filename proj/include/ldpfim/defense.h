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

#ifndef LDPFIM_DEFENSE_H_
#define LDPFIM_DEFENSE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldpfim/frequency_oracle.h"
#include "ldpfim/mining.h"
#include "ldpfim/random.h"

namespace ldpfim {

enum class DefenseKind { kNone, kFilterFo, kRandK, kReplaceFo, kCryptoFo };

struct Defense {
  DefenseKind kind = DefenseKind::kNone;
  std::optional<double> theta;  // FilterFO; default per oracle.
  uint32_t k_prime_max = 0;     // RandK; 0 means 2k.
};

std::string DefenseName(const Defense& defense);
absl::StatusOr<Defense> ParseDefense(absl::string_view text);

// 2d/g for hashing oracles, 2d/(e^{eps/2}+1) for RAPPOR, d otherwise.
double DefaultFilterTheta(const FOConfig& cfg);

struct FilterOutcome {
  std::vector<EncodedReport> kept;
  uint32_t dropped = 0;
};

// Drops every report supporting more than theta items of [0, cfg.d).
FilterOutcome FilterReports(const FOConfig& cfg, double theta,
                            std::vector<EncodedReport> reports);

// Probability that an honest report is dropped at threshold theta.
double Fpr(FOKind kind, double theta, uint32_t d, const FOConfig& cfg);

// P[X >= a] for X ~ Binomial(n, p).
double BinomialTail(uint32_t n, double p, int64_t a);

// Expected support count of an honest RAPPOR report.
double RapporExpectedSupport(uint32_t d, double q);

// Mining configuration with the defense's protocol-side switches set. RandK
// draws k' from `rng` and keeps the adversary's view at the nominal k.
absl::StatusOr<MiningConfig> ApplyDefense(const Defense& defense,
                                          MiningConfig base, Rng& rng);

}  // namespace ldpfim

#endif  // LDPFIM_DEFENSE_H_
