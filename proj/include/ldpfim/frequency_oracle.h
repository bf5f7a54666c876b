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

#ifndef LDPFIM_FREQUENCY_ORACLE_H_
#define LDPFIM_FREQUENCY_ORACLE_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldpfim/random.h"

namespace ldpfim {

enum class FOKind { kGrr, kOlh, kSh, kRappor, kPrivSet };

absl::string_view FOKindName(FOKind kind);
absl::StatusOr<FOKind> ParseFOKind(absl::string_view name);

// Parameters of one frequency oracle instance. `d` is the encoded input
// domain, dummy padding slots included.
struct FOConfig {
  FOKind kind = FOKind::kGrr;
  double epsilon = 0.0;
  uint32_t d = 0;
  uint32_t g = 0;  // Hash codomain for OLH/SH; equals d for GRR.
  double p = 0.0;
  double q = 0.0;
  uint32_t kappa = 0;      // PrivSet output size.
  uint32_t padding_l = 1;  // PrivSet input size.
  // PrivSet: CDF over the overlap size j = |output ∩ input|, indexed by j.
  std::vector<double> overlap_cdf;
};

struct GrrReport {
  uint32_t item = 0;
  bool operator==(const GrrReport&) const = default;
};

struct HashReport {
  uint64_t seed = 0;
  uint32_t hashed = 0;
  bool operator==(const HashReport&) const = default;
};

struct BitVector {
  std::vector<uint64_t> words;
  uint32_t size = 0;

  explicit BitVector(uint32_t n = 0) : words((n + 63) / 64, 0), size(n) {}
  bool Get(uint32_t i) const { return (words[i >> 6] >> (i & 63)) & 1; }
  void Set(uint32_t i) { words[i >> 6] |= uint64_t{1} << (i & 63); }
  uint32_t Count() const;
  bool operator==(const BitVector&) const = default;
};

struct SetReport {
  std::vector<uint32_t> items;  // Sorted, distinct.
  bool operator==(const SetReport&) const = default;
};

using EncodedReport = std::variant<GrrReport, HashReport, BitVector, SetReport>;

// True iff the variant alternative is the one `kind` produces.
bool ReportMatches(FOKind kind, const EncodedReport& report);

absl::StatusOr<FOConfig> MakeConfig(FOKind kind, double epsilon, uint32_t d,
                                    uint32_t l = 1);

// Test-only surrogate of the epsilon -> infinity limit: every report carries
// its input exactly (p = 1, q = 0; OLH uses a 2^30 codomain).
FOConfig MakeNoiselessConfig(FOKind kind, uint32_t d, uint32_t l = 1);

absl::StatusOr<EncodedReport> Perturb(const FOConfig& cfg, uint32_t item,
                                      Rng& rng);

// PrivSet only: `padded` holds exactly cfg.padding_l distinct items.
absl::StatusOr<EncodedReport> PerturbSet(const FOConfig& cfg,
                                         std::span<const uint32_t> padded,
                                         Rng& rng);

absl::StatusOr<bool> Support(const FOConfig& cfg, const EncodedReport& report,
                             uint32_t item);

// Unchecked variant for hot loops. The caller guarantees the alternative
// matches cfg.kind and item < cfg.d.
bool SupportsUnchecked(const FOConfig& cfg, const EncodedReport& report,
                       uint32_t item);

// Number of items in [0, cfg.d) the report supports.
uint32_t SupportSize(const FOConfig& cfg, const EncodedReport& report);

// Support counts for every item in [0, cfg.d).
absl::StatusOr<std::vector<uint64_t>> SupportCounts(
    const FOConfig& cfg, std::span<const EncodedReport> reports);

// Unbiased estimates for every item in [0, cfg.d). Not clipped.
absl::StatusOr<std::vector<double>> EstimateFrequencies(
    const FOConfig& cfg, std::span<const EncodedReport> reports);

// (count - n q) / (n (p - q)).
double EstimateFromCount(const FOConfig& cfg, double count, double n);

absl::StatusOr<double> Aggregate(const FOConfig& cfg,
                                 std::span<const EncodedReport> reports,
                                 uint32_t item);

// Per-item estimator variance factor q(1-q)/(p-q)^2 for a PrivSet instance
// with output size kappa. Infinite when the instance is degenerate.
double PrivSetVariance(double epsilon, uint32_t d, uint32_t l, uint32_t kappa);

absl::StatusOr<uint32_t> PrivSetKappa(double epsilon, uint32_t d, uint32_t l);

}  // namespace ldpfim

#endif  // LDPFIM_FREQUENCY_ORACLE_H_
