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

#include "ldpfim/frequency_oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "ldpfim/seeded_hash.h"

namespace ldpfim {
namespace {

double LogChoose(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

struct PrivSetParams {
  double p = 0.0;
  double q = 0.0;
  std::vector<double> cdf;
  bool degenerate = true;
};

// Output distribution of the set mechanism. An output of size kappa that
// shares j items with the padded input gets weight exp(eps * j / s) with
// s = min(l, kappa), the largest change in j a different input can cause.
PrivSetParams ComputePrivSet(double epsilon, uint32_t d, uint32_t l,
                             uint32_t kappa) {
  PrivSetParams out;
  if (l >= d || kappa == 0 || kappa >= d) return out;
  const uint32_t s = std::min(l, kappa);
  const uint32_t j_lo = kappa > d - l ? kappa - (d - l) : 0;
  const uint32_t j_hi = s;
  std::vector<double> logw(j_hi + 1, -std::numeric_limits<double>::infinity());
  double max_logw = -std::numeric_limits<double>::infinity();
  for (uint32_t j = j_lo; j <= j_hi; ++j) {
    logw[j] = LogChoose(l, j) + LogChoose(d - l, kappa - j) +
              epsilon * static_cast<double>(j) / s;
    max_logw = std::max(max_logw, logw[j]);
  }
  std::vector<double> w(j_hi + 1, 0.0);
  double total = 0.0;
  for (uint32_t j = j_lo; j <= j_hi; ++j) {
    w[j] = std::exp(logw[j] - max_logw);
    total += w[j];
  }
  double mean_j = 0.0;
  out.cdf.assign(j_hi + 1, 0.0);
  double acc = 0.0;
  for (uint32_t j = 0; j <= j_hi; ++j) {
    w[j] /= total;
    mean_j += j * w[j];
    acc += w[j];
    out.cdf[j] = acc;
  }
  out.cdf.back() = 1.0;
  out.p = mean_j / l;
  out.q = (kappa - mean_j) / (d - l);
  out.degenerate = !(out.p > out.q) || !(out.q > 0.0);
  return out;
}

absl::Status CheckEpsilonAndDomain(double epsilon, uint32_t d) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive, got %g", epsilon));
  }
  if (d < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("domain size must be at least 2, got %d", d));
  }
  return absl::OkStatus();
}

uint32_t OtherThan(uint32_t value, uint32_t range, Rng& rng) {
  uint32_t r = static_cast<uint32_t>(rng.UniformInt(range - 1));
  return r >= value ? r + 1 : r;
}

}  // namespace

absl::string_view FOKindName(FOKind kind) {
  switch (kind) {
    case FOKind::kGrr:
      return "GRR";
    case FOKind::kOlh:
      return "OLH";
    case FOKind::kSh:
      return "SH";
    case FOKind::kRappor:
      return "RAPPOR";
    case FOKind::kPrivSet:
      return "PRIVSET";
  }
  return "?";
}

absl::StatusOr<FOKind> ParseFOKind(absl::string_view name) {
  for (FOKind k : {FOKind::kGrr, FOKind::kOlh, FOKind::kSh, FOKind::kRappor,
                   FOKind::kPrivSet}) {
    if (name == FOKindName(k)) return k;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown frequency oracle '%s'", name));
}

uint32_t BitVector::Count() const {
  uint32_t c = 0;
  for (uint64_t w : words) c += std::popcount(w);
  return c;
}

bool ReportMatches(FOKind kind, const EncodedReport& report) {
  switch (kind) {
    case FOKind::kGrr:
      return std::holds_alternative<GrrReport>(report);
    case FOKind::kOlh:
    case FOKind::kSh:
      return std::holds_alternative<HashReport>(report);
    case FOKind::kRappor:
      return std::holds_alternative<BitVector>(report);
    case FOKind::kPrivSet:
      return std::holds_alternative<SetReport>(report);
  }
  return false;
}

absl::StatusOr<FOConfig> MakeConfig(FOKind kind, double epsilon, uint32_t d,
                                    uint32_t l) {
  if (absl::Status s = CheckEpsilonAndDomain(epsilon, d); !s.ok()) return s;
  if (l < 1) return absl::InvalidArgumentError("padding length must be >= 1");
  FOConfig cfg;
  cfg.kind = kind;
  cfg.epsilon = epsilon;
  cfg.d = d;
  cfg.padding_l = l;
  const double e = std::exp(epsilon);
  switch (kind) {
    case FOKind::kGrr:
      cfg.g = d;
      cfg.p = e / (e + d - 1);
      cfg.q = 1.0 / (e + d - 1);
      break;
    case FOKind::kOlh:
    case FOKind::kSh: {
      if (kind == FOKind::kSh) {
        cfg.g = 2;
      } else {
        // The slack keeps e.g. exp(log 3) = 3.0000000000000004 at g = 4.
        const double c = std::ceil(e - 1e-9);
        cfg.g = c + 1 > 1u << 30 ? 1u << 30 : static_cast<uint32_t>(c) + 1;
      }
      cfg.p = e / (e + cfg.g - 1);
      cfg.q = 1.0 / cfg.g;
      break;
    }
    case FOKind::kRappor:
      cfg.q = 1.0 / (std::exp(epsilon / 2) + 1);
      cfg.p = 1.0 - cfg.q;
      break;
    case FOKind::kPrivSet: {
      if (l >= d) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "PrivSet needs padding length %d below domain size %d", l, d));
      }
      absl::StatusOr<uint32_t> kappa = PrivSetKappa(epsilon, d, l);
      if (!kappa.ok()) return kappa.status();
      PrivSetParams ps = ComputePrivSet(epsilon, d, l, *kappa);
      cfg.kappa = *kappa;
      cfg.p = ps.p;
      cfg.q = ps.q;
      cfg.overlap_cdf = std::move(ps.cdf);
      break;
    }
  }
  return cfg;
}

FOConfig MakeNoiselessConfig(FOKind kind, uint32_t d, uint32_t l) {
  FOConfig cfg;
  cfg.kind = kind;
  cfg.epsilon = std::numeric_limits<double>::infinity();
  cfg.d = d;
  cfg.padding_l = l;
  cfg.p = 1.0;
  cfg.q = 0.0;
  switch (kind) {
    case FOKind::kGrr:
      cfg.g = d;
      break;
    case FOKind::kOlh:
    case FOKind::kSh:
      cfg.g = 1u << 30;
      cfg.q = 1.0 / cfg.g;
      break;
    case FOKind::kRappor:
      break;
    case FOKind::kPrivSet:
      cfg.kappa = l;
      cfg.overlap_cdf.assign(l + 1, 0.0);
      cfg.overlap_cdf[l] = 1.0;
      break;
  }
  return cfg;
}

absl::StatusOr<EncodedReport> Perturb(const FOConfig& cfg, uint32_t item,
                                      Rng& rng) {
  if (item >= cfg.d) {
    return absl::OutOfRangeError(
        absl::StrFormat("item %d outside domain of size %d", item, cfg.d));
  }
  switch (cfg.kind) {
    case FOKind::kGrr: {
      if (rng.Bernoulli(cfg.p)) return GrrReport{item};
      return GrrReport{OtherThan(item, cfg.d, rng)};
    }
    case FOKind::kOlh:
    case FOKind::kSh: {
      const uint64_t seed = rng();
      const uint32_t v = SeededHash(seed, cfg.g)(item);
      if (rng.Bernoulli(cfg.p)) return HashReport{seed, v};
      return HashReport{seed, OtherThan(v, cfg.g, rng)};
    }
    case FOKind::kRappor: {
      BitVector bits(cfg.d);
      for (uint32_t i = 0; i < cfg.d; ++i) {
        const bool truth = i == item;
        if (rng.Bernoulli(cfg.q) != truth) bits.Set(i);
      }
      return bits;
    }
    case FOKind::kPrivSet:
      return absl::InvalidArgumentError(
          "PrivSet perturbs a padded set; use PerturbSet");
  }
  return absl::InternalError("unreachable");
}

absl::StatusOr<EncodedReport> PerturbSet(const FOConfig& cfg,
                                         std::span<const uint32_t> padded,
                                         Rng& rng) {
  if (cfg.kind != FOKind::kPrivSet) {
    return absl::InvalidArgumentError("PerturbSet requires a PrivSet config");
  }
  if (padded.size() != cfg.padding_l) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "padded set has %d items, expected %d", padded.size(), cfg.padding_l));
  }
  std::vector<uint32_t> input(padded.begin(), padded.end());
  std::sort(input.begin(), input.end());
  if (std::adjacent_find(input.begin(), input.end()) != input.end()) {
    return absl::InvalidArgumentError("padded set has duplicate items");
  }
  if (!input.empty() && input.back() >= cfg.d) {
    return absl::OutOfRangeError(absl::StrFormat(
        "item %d outside domain of size %d", input.back(), cfg.d));
  }
  const double u = rng.Uniform();
  uint32_t j = 0;
  while (j + 1 < cfg.overlap_cdf.size() && cfg.overlap_cdf[j] <= u) ++j;
  const uint32_t l = cfg.padding_l;
  SetReport out;
  out.items.reserve(cfg.kappa);
  // j uniform members of the input.
  std::vector<uint32_t> pool = input;
  for (uint32_t i = 0; i < j; ++i) {
    std::swap(pool[i], pool[i + rng.UniformInt(l - i)]);
    out.items.push_back(pool[i]);
  }
  // kappa - j uniform non-members: Floyd sampling over ranks among the
  // d - l non-members, then rank -> element by skipping input items.
  const uint32_t rest = cfg.kappa - j;
  const uint32_t outside = cfg.d - l;
  std::vector<char> taken(outside, 0);
  for (uint32_t t = outside - rest; t < outside; ++t) {
    uint32_t r = static_cast<uint32_t>(rng.UniformInt(t + 1));
    if (taken[r]) r = t;
    taken[r] = 1;
  }
  auto in = input.begin();
  uint32_t element = 0;
  for (uint32_t r = 0; r < outside; ++r, ++element) {
    while (in != input.end() && *in == element) {
      ++in;
      ++element;
    }
    if (taken[r]) out.items.push_back(element);
  }
  std::sort(out.items.begin(), out.items.end());
  return out;
}

bool SupportsUnchecked(const FOConfig& cfg, const EncodedReport& report,
                       uint32_t item) {
  switch (report.index()) {
    case 0:
      return std::get<GrrReport>(report).item == item;
    case 1: {
      const auto& r = std::get<HashReport>(report);
      return SeededHash(r.seed, cfg.g)(item) == r.hashed;
    }
    case 2:
      return std::get<BitVector>(report).Get(item);
    default: {
      const auto& items = std::get<SetReport>(report).items;
      return std::binary_search(items.begin(), items.end(), item);
    }
  }
}

absl::StatusOr<bool> Support(const FOConfig& cfg, const EncodedReport& report,
                             uint32_t item) {
  if (!ReportMatches(cfg.kind, report)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "report variant does not match oracle %s", FOKindName(cfg.kind)));
  }
  if (item >= cfg.d) {
    return absl::OutOfRangeError(
        absl::StrFormat("item %d outside domain of size %d", item, cfg.d));
  }
  if (const auto* bits = std::get_if<BitVector>(&report);
      bits != nullptr && bits->size != cfg.d) {
    return absl::FailedPreconditionError("bit vector length mismatch");
  }
  return SupportsUnchecked(cfg, report, item);
}

uint32_t SupportSize(const FOConfig& cfg, const EncodedReport& report) {
  switch (report.index()) {
    case 0:
      return std::get<GrrReport>(report).item < cfg.d ? 1 : 0;
    case 1: {
      const auto& r = std::get<HashReport>(report);
      const SeededHash hash(r.seed, cfg.g);
      uint32_t c = 0;
      for (uint32_t t = 0; t < cfg.d; ++t) c += hash(t) == r.hashed;
      return c;
    }
    case 2:
      return std::get<BitVector>(report).Count();
    default:
      return static_cast<uint32_t>(std::get<SetReport>(report).items.size());
  }
}

absl::StatusOr<std::vector<uint64_t>> SupportCounts(
    const FOConfig& cfg, std::span<const EncodedReport> reports) {
  std::vector<uint64_t> counts(cfg.d, 0);
  for (const EncodedReport& report : reports) {
    if (!ReportMatches(cfg.kind, report)) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "report variant does not match oracle %s", FOKindName(cfg.kind)));
    }
    switch (report.index()) {
      case 0: {
        const uint32_t item = std::get<GrrReport>(report).item;
        if (item >= cfg.d) return absl::OutOfRangeError("GRR report range");
        ++counts[item];
        break;
      }
      case 1: {
        const auto& r = std::get<HashReport>(report);
        const SeededHash hash(r.seed, cfg.g);
        for (uint32_t t = 0; t < cfg.d; ++t) counts[t] += hash(t) == r.hashed;
        break;
      }
      case 2: {
        const auto& bits = std::get<BitVector>(report);
        if (bits.size != cfg.d) {
          return absl::FailedPreconditionError("bit vector length mismatch");
        }
        for (size_t w = 0; w < bits.words.size(); ++w) {
          uint64_t word = bits.words[w];
          while (word != 0) {
            ++counts[w * 64 + std::countr_zero(word)];
            word &= word - 1;
          }
        }
        break;
      }
      default:
        for (uint32_t item : std::get<SetReport>(report).items) {
          if (item >= cfg.d) return absl::OutOfRangeError("set report range");
          ++counts[item];
        }
    }
  }
  return counts;
}

double EstimateFromCount(const FOConfig& cfg, double count, double n) {
  return (count - n * cfg.q) / (n * (cfg.p - cfg.q));
}

absl::StatusOr<std::vector<double>> EstimateFrequencies(
    const FOConfig& cfg, std::span<const EncodedReport> reports) {
  if (reports.empty()) {
    return absl::InvalidArgumentError("cannot aggregate an empty report list");
  }
  absl::StatusOr<std::vector<uint64_t>> counts = SupportCounts(cfg, reports);
  if (!counts.ok()) return counts.status();
  std::vector<double> est(cfg.d);
  const double n = static_cast<double>(reports.size());
  for (uint32_t t = 0; t < cfg.d; ++t) {
    est[t] = EstimateFromCount(cfg, static_cast<double>((*counts)[t]), n);
  }
  return est;
}

absl::StatusOr<double> Aggregate(const FOConfig& cfg,
                                 std::span<const EncodedReport> reports,
                                 uint32_t item) {
  if (reports.empty()) {
    return absl::InvalidArgumentError("cannot aggregate an empty report list");
  }
  double count = 0;
  for (const EncodedReport& report : reports) {
    absl::StatusOr<bool> s = Support(cfg, report, item);
    if (!s.ok()) return s.status();
    count += *s;
  }
  return EstimateFromCount(cfg, count, static_cast<double>(reports.size()));
}

double PrivSetVariance(double epsilon, uint32_t d, uint32_t l,
                       uint32_t kappa) {
  const PrivSetParams ps = ComputePrivSet(epsilon, d, l, kappa);
  if (ps.degenerate) return std::numeric_limits<double>::infinity();
  return ps.q * (1 - ps.q) / ((ps.p - ps.q) * (ps.p - ps.q));
}

absl::StatusOr<uint32_t> PrivSetKappa(double epsilon, uint32_t d, uint32_t l) {
  if (absl::Status s = CheckEpsilonAndDomain(epsilon, d); !s.ok()) return s;
  if (l < 1 || l > d) {
    return absl::InvalidArgumentError(
        absl::StrFormat("padding length %d outside [1, %d]", l, d));
  }
  uint32_t best = 1;
  double best_var = std::numeric_limits<double>::infinity();
  for (uint32_t kappa = 1; kappa < d; ++kappa) {
    const double v = PrivSetVariance(epsilon, d, l, kappa);
    if (v < best_var) {
      best_var = v;
      best = kappa;
    }
  }
  return best;
}

}  // namespace ldpfim
