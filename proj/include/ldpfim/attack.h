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

#ifndef LDPFIM_ATTACK_H_
#define LDPFIM_ATTACK_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldpfim/dataset.h"
#include "ldpfim/frequency_oracle.h"
#include "ldpfim/mining.h"
#include "ldpfim/random.h"

namespace ldpfim {

struct ThreatModel {
  enum class Kind { kFull, kPartial, kMitm };
  Kind kind = Kind::kFull;
  // PK: share of users whose transactions are known. MITM: share of benign
  // reports intercepted.
  double fraction = 1.0;

  std::string Name() const;  // FK, PK-0.1, MITM-0.1
};
absl::StatusOr<ThreatModel> ParseThreat(absl::string_view text);

enum class AttackKind { kNone, kAoa, kRra, kRsa, kMgaR, kMgaAdv };
absl::string_view AttackName(AttackKind kind);
absl::StatusOr<AttackKind> ParseAttack(absl::string_view text);

struct TargetSet {
  std::vector<uint32_t> elements;  // Ranked k+1, ..., k+L.
  std::vector<double> gaps;        // Aligned with elements.
  uint32_t pivot_rank = 0;         // k + 1 - L, 1-based; 0 when empty.
  double cost = 0;

  size_t size() const { return elements.size(); }
};

struct ResourceEstimate {
  FOKind fo = FOKind::kGrr;
  double expected_supports = 0;     // Over all m crafted reports.
  double per_report_increment = 0;  // Frequency change of one support.
};

// Change of the aggregate on `item` caused by adding `poisoned` to `benign`.
absl::StatusOr<double> FrequencyGain(const FOConfig& cfg,
                                     std::span<const EncodedReport> poisoned,
                                     std::span<const EncodedReport> benign,
                                     uint32_t item);

// Expected maximum, over h draws, of a Binomial(b, alpha) support count.
double ExpectedMaxSupport(uint32_t h, uint32_t b, double alpha);

// `population` is the number of reports in the round (benign plus crafted);
// `scale` the padding correction applied to estimates.
ResourceEstimate EstimateResources(const FOConfig& cfg, uint32_t m,
                                   uint32_t target_size, uint32_t h,
                                   double population, double scale = 1.0);

// Total pivot-relative frequency gain m crafted reports can spread over L
// targets.
double TargetBudget(const FOConfig& cfg, uint32_t m, uint32_t target_size,
                    uint32_t h, double inc);

// Largest L whose refinement cost fits in budget(L).
absl::StatusOr<TargetSet> RefineTargets(
    std::span<const double> benign_freqs, uint32_t k,
    const std::function<double(uint32_t)>& budget);
absl::StatusOr<TargetSet> RefineTargets(std::span<const double> benign_freqs,
                                        uint32_t k, double budget);

struct PdgenOptions {
  uint32_t h = 1000;
  // Keep crafting after every gap is closed until m reports exist.
  bool spend_all = false;
  // Elements below this index are real; fillers prefer slots above it.
  uint32_t domain_size = 0;
};

// Gap-aware poisoned reports for targets in [0, cfg.d); at most m.
absl::StatusOr<std::vector<EncodedReport>> GeneratePoisonedReports(
    const FOConfig& cfg, const TargetSet& targets, double inc, uint32_t m,
    const PdgenOptions& options, Rng& rng);

// m reports spreading support evenly over `targets`, without gap budgeting.
absl::StatusOr<std::vector<EncodedReport>> GenerateUniformReports(
    const FOConfig& cfg, std::span<const uint32_t> targets, uint32_t m,
    const PdgenOptions& options, Rng& rng);

// One OLH/SH seed search: best of h seeds for the number of `targets` sharing
// the axis hash value. The report always supports the axis.
HashReport SampleAxis(const FOConfig& cfg, uint32_t axis,
                      std::span<const uint32_t> targets, uint32_t h, Rng& rng);

// Plug-in item frequencies under a threat model. FK and PK read the given
// transactions; MITM aggregates intercepted reports with `cfg`.
absl::StatusOr<std::vector<double>> EstimateItemKnowledge(
    const ThreatModel& threat, const TransactionDb& db,
    std::span<const uint32_t> known_users,
    std::span<const EncodedReport> intercepted, const FOConfig& cfg);

struct AttackSpec {
  AttackKind kind = AttackKind::kNone;
  ThreatModel threat;
  uint32_t h = 1000;
  uint64_t seed = 0;
};

// Adversary for one protocol run. `corrupted` flags the controlled users.
absl::StatusOr<std::unique_ptr<AdversaryHook>> BuildAttack(
    const AttackSpec& spec, ProtocolKind protocol, const TransactionDb& db,
    std::span<const uint8_t> corrupted);

}  // namespace ldpfim

#endif  // LDPFIM_ATTACK_H_
