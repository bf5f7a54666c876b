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

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"

namespace ldpfim {

std::string DefenseName(const Defense& defense) {
  switch (defense.kind) {
    case DefenseKind::kNone:
      return "NONE";
    case DefenseKind::kFilterFo:
      return defense.theta ? absl::StrCat("FILTER_FO:", *defense.theta)
                           : "FILTER_FO";
    case DefenseKind::kRandK:
      return defense.k_prime_max
                 ? absl::StrCat("RAND_K:", defense.k_prime_max)
                 : "RAND_K";
    case DefenseKind::kReplaceFo:
      return "REPLACE_FO";
    case DefenseKind::kCryptoFo:
      return "CRYPTO_FO";
  }
  return "?";
}

absl::StatusOr<Defense> ParseDefense(absl::string_view text) {
  std::vector<absl::string_view> parts = absl::StrSplit(text, ':');
  Defense d;
  const absl::string_view head = parts[0];
  if (head == "NONE") {
    d.kind = DefenseKind::kNone;
  } else if (head == "FILTER_FO") {
    d.kind = DefenseKind::kFilterFo;
    if (parts.size() > 1) {
      double theta;
      if (!absl::SimpleAtod(parts[1], &theta) || theta < 1) {
        return absl::InvalidArgumentError(
            absl::StrFormat("bad FilterFO threshold '%s'", parts[1]));
      }
      d.theta = theta;
    }
  } else if (head == "RAND_K") {
    d.kind = DefenseKind::kRandK;
    if (parts.size() > 1 && !absl::SimpleAtoi(parts[1], &d.k_prime_max)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("bad RandK bound '%s'", parts[1]));
    }
  } else if (head == "REPLACE_FO") {
    d.kind = DefenseKind::kReplaceFo;
  } else if (head == "CRYPTO_FO") {
    d.kind = DefenseKind::kCryptoFo;
  } else {
    return absl::InvalidArgumentError(
        absl::StrFormat("unknown defense '%s'", text));
  }
  if (parts.size() > 2 ||
      (parts.size() == 2 && d.kind != DefenseKind::kFilterFo &&
       d.kind != DefenseKind::kRandK)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("malformed defense '%s'", text));
  }
  return d;
}

double DefaultFilterTheta(const FOConfig& cfg) {
  switch (cfg.kind) {
    case FOKind::kOlh:
    case FOKind::kSh:
      return 2.0 * cfg.d / cfg.g;
    case FOKind::kRappor:
      return 2.0 * cfg.d / (std::exp(cfg.epsilon / 2) + 1);
    default:
      return cfg.d;
  }
}

FilterOutcome FilterReports(const FOConfig& cfg, double theta,
                            std::vector<EncodedReport> reports) {
  FilterOutcome out;
  if (cfg.kind == FOKind::kGrr) {
    out.kept = std::move(reports);
    return out;
  }
  out.kept.reserve(reports.size());
  for (EncodedReport& r : reports) {
    if (SupportSize(cfg, r) > theta) {
      ++out.dropped;
    } else {
      out.kept.push_back(std::move(r));
    }
  }
  return out;
}

double BinomialTail(uint32_t n, double p, int64_t a) {
  if (a <= 0) return 1.0;
  if (a > n) return 0.0;
  if (p <= 0) return 0.0;
  if (p >= 1) return 1.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  double sum = 0;
  for (int64_t x = a; x <= n; ++x) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(x + 1.0) -
                           std::lgamma(n - x + 1.0) + x * lp + (n - x) * lq;
    sum += std::exp(log_pmf);
  }
  return std::min(sum, 1.0);
}

double RapporExpectedSupport(uint32_t d, double q) {
  return 1.0 + (d - 2.0) * q;
}

double Fpr(FOKind kind, double theta, uint32_t d, const FOConfig& cfg) {
  // A report is dropped when its support count exceeds theta, i.e. reaches
  // a = floor(theta) + 1. X counts supported items other than the input.
  const int64_t a = static_cast<int64_t>(std::floor(theta)) + 1;
  switch (kind) {
    case FOKind::kGrr:
      return a <= 1 ? 1.0 : 0.0;
    case FOKind::kOlh:
    case FOKind::kSh: {
      const double alpha = 1.0 / cfg.g;
      return (BinomialTail(d - 1, alpha, a - 1) +
              BinomialTail(d - 1, alpha, a)) /
             2;
    }
    case FOKind::kRappor:
      return (1 - cfg.q) * BinomialTail(d - 1, cfg.q, a - 1) +
             cfg.q * BinomialTail(d - 1, cfg.q, a);
    case FOKind::kPrivSet:
      return cfg.kappa > theta ? 1.0 : 0.0;
  }
  return 0.0;
}

absl::StatusOr<MiningConfig> ApplyDefense(const Defense& defense,
                                          MiningConfig base, Rng& rng) {
  switch (defense.kind) {
    case DefenseKind::kNone:
      break;
    case DefenseKind::kFilterFo:
      base.filter = true;
      base.filter_theta = defense.theta;
      break;
    case DefenseKind::kRandK: {
      const uint32_t k = base.k;
      const uint32_t kmax = defense.k_prime_max ? defense.k_prime_max : 2 * k;
      if (kmax <= k) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "RandK bound %d must exceed k = %d", kmax, k));
      }
      base.advertised_k = k;
      base.k = k + 1 + static_cast<uint32_t>(rng.UniformInt(kmax - k));
      break;
    }
    case DefenseKind::kReplaceFo:
      base.force_grr = true;
      break;
    case DefenseKind::kCryptoFo:
      base.input_only = true;
      break;
  }
  return base;
}

}  // namespace ldpfim
