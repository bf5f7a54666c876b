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

#ifndef LDPFIM_MINING_H_
#define LDPFIM_MINING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldpfim/dataset.h"
#include "ldpfim/frequency_oracle.h"
#include "ldpfim/random.h"

namespace ldpfim {

enum class ProtocolKind { kLdpMiner, kSvim, kSvsm, kFimlI, kFimlIs, kPrivSetTopK };

absl::string_view ProtocolName(ProtocolKind kind);
absl::StatusOr<ProtocolKind> ParseProtocol(absl::string_view name);

// True for protocols whose output is itemsets rather than items.
bool MinesItemsets(ProtocolKind kind);

struct MiningConfig {
  uint32_t k = 16;
  // The k the adversary is told about. Differs from k under randomized k.
  uint32_t advertised_k = 0;  // 0: same as k.
  double epsilon = 4.0;
  // LDPMiner: share of epsilon spent in the pruning phase.
  double budget_split = 0.5;
  // SVIM/SVSM: prune, length and select group shares.
  std::vector<double> group_split = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  // FIML: share of users in the pruning group.
  double fiml_split = 0.5;
  double percentile = 0.9;
  // LDPMiner / PrivSet padding. 0: percentile of the true lengths.
  uint32_t padding_l = 0;

  // Defense switches.
  bool force_grr = false;  // Hashing oracles are swapped for GRR.
  bool filter = false;     // Drop reports supporting more than theta items.
  std::optional<double> filter_theta;  // Default: per-oracle rule.
  bool input_only = false;  // Adversary may only substitute inputs.

  uint32_t AdvertisedK() const { return advertised_k == 0 ? k : advertised_k; }
};

enum class Phase { kPrune, kLength, kSelect, kMembership, kSingle };
absl::string_view PhaseName(Phase phase);

// Everything the adversary observes about one reporting round.
struct PhaseContext {
  ProtocolKind protocol = ProtocolKind::kSvim;
  Phase phase = Phase::kPrune;
  // SVSM runs item mining (stage 0) before itemset mining (stage 1).
  int stage = 0;
  const FOConfig* fo = nullptr;
  // Elements at positions [0, size); dummy slots follow. In the length
  // phase this is the candidate set being measured and the oracle values
  // 0..fo->d-1 encode lengths 1..fo->d.
  const ElementDomain* domain = nullptr;
  uint32_t padding_l = 1;
  // Estimates are multiplied by this before ranking.
  double scale = 1.0;
  uint32_t advertised_k = 0;
  // How many elements this round keeps.
  uint32_t output_size = 0;
  std::span<const uint32_t> benign_users;
  std::span<const uint32_t> corrupted_users;
  // Benign reports, aligned with benign_users. Membership rounds also expose
  // the candidate each user was asked about.
  std::span<const EncodedReport> benign_reports;
  std::span<const uint32_t> benign_queries;
  std::span<const uint32_t> corrupted_queries;
  bool input_only = false;

  uint32_t num_reports() const {
    return static_cast<uint32_t>(benign_users.size() + corrupted_users.size());
  }
};

struct PhaseResponse {
  enum class Mode { kHonest, kReports, kInputs };
  Mode mode = Mode::kHonest;
  // kReports: at most one per corrupted user; users without one report
  // honestly.
  std::vector<EncodedReport> reports;
  // kInputs: one substitute transaction per corrupted user, perturbed through
  // the honest path.
  std::vector<std::vector<uint32_t>> inputs;
};

class AdversaryHook {
 public:
  virtual ~AdversaryHook() = default;
  virtual absl::StatusOr<PhaseResponse> Respond(const PhaseContext& ctx) = 0;
};

struct PhaseAudit {
  Phase phase = Phase::kPrune;
  int stage = 0;
  FOKind fo = FOKind::kGrr;
  double epsilon = 0;
  uint32_t fo_domain = 0;
  uint32_t padding_l = 1;
  uint32_t candidates = 0;
  uint32_t benign_reports = 0;
  uint32_t corrupted_reports = 0;
  uint32_t dropped = 0;
  std::string ToString() const;
};

struct MiningResult {
  std::vector<ItemsetKey> topk;
  std::vector<double> estimates;
  // Elements of the final round, the only ones eligible for the output.
  std::vector<ItemsetKey> candidates;
  std::vector<PhaseAudit> audit;
  uint32_t dropped_reports = 0;
};

// OLH iff d >= l (4l - 1) e^epsilon + 1.
FOKind ChooseFo(uint32_t d, uint32_t l, double epsilon);

// Lengths are encoded as values 0..cfg.d-1 meaning 1..cfg.d. Negative
// estimates are clipped before taking the percentile.
absl::StatusOr<uint32_t> EstimatePaddingLength(
    const FOConfig& cfg, std::span<const EncodedReport> length_reports,
    double percentile);

// Highest-guess itemsets built from estimated item frequencies, best first.
std::vector<std::pair<ItemsetKey, double>> SvsmGuessCandidates(
    std::span<const std::pair<uint32_t, double>> topk_items,
    uint32_t out_size);

// `corrupted` is empty or holds one flag per user. Corrupted users are
// driven by `adversary` when present and report honestly otherwise.
absl::StatusOr<MiningResult> RunProtocol(ProtocolKind kind,
                                         const TransactionDb& db,
                                         const MiningConfig& cfg,
                                         std::span<const uint8_t> corrupted,
                                         AdversaryHook* adversary,
                                         const Rng& rng);

}  // namespace ldpfim

#endif  // LDPFIM_MINING_H_
