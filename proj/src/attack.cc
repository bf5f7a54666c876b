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

#include "ldpfim/attack.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/strip.h"
#include "absl/strings/str_format.h"
#include "ldpfim/seeded_hash.h"
#include "ldpfim/status_macros.h"

namespace ldpfim {

std::string ThreatModel::Name() const {
  switch (kind) {
    case Kind::kFull:
      return "FK";
    case Kind::kPartial:
      return absl::StrCat("PK-", fraction);
    case Kind::kMitm:
      return absl::StrCat("MITM-", fraction);
  }
  return "?";
}

absl::StatusOr<ThreatModel> ParseThreat(absl::string_view text) {
  ThreatModel t;
  if (text == "FK") return t;
  if (absl::ConsumePrefix(&text, "PK-")) {
    t.kind = ThreatModel::Kind::kPartial;
  } else if (absl::ConsumePrefix(&text, "MITM-")) {
    t.kind = ThreatModel::Kind::kMitm;
  } else {
    return absl::InvalidArgumentError(
        absl::StrFormat("unknown threat model '%s'", text));
  }
  if (!absl::SimpleAtod(text, &t.fraction) || !(t.fraction > 0) ||
      t.fraction > 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("threat fraction '%s' outside (0, 1]", text));
  }
  return t;
}

absl::string_view AttackName(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone:
      return "NONE";
    case AttackKind::kAoa:
      return "AOA";
    case AttackKind::kRra:
      return "RRA";
    case AttackKind::kRsa:
      return "RSA";
    case AttackKind::kMgaR:
      return "MGA_R";
    case AttackKind::kMgaAdv:
      return "MGA_ADV";
  }
  return "?";
}

absl::StatusOr<AttackKind> ParseAttack(absl::string_view text) {
  for (AttackKind k : {AttackKind::kNone, AttackKind::kAoa, AttackKind::kRra,
                       AttackKind::kRsa, AttackKind::kMgaR,
                       AttackKind::kMgaAdv}) {
    if (text == AttackName(k)) return k;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown attack '%s'", text));
}

absl::StatusOr<double> FrequencyGain(const FOConfig& cfg,
                                     std::span<const EncodedReport> poisoned,
                                     std::span<const EncodedReport> benign,
                                     uint32_t item) {
  if (benign.empty()) {
    return absl::InvalidArgumentError("frequency gain needs benign reports");
  }
  double benign_support = 0;
  for (const EncodedReport& r : benign) {
    LDPFIM_ASSIGN_OR_RETURN(bool s, Support(cfg, r, item));
    benign_support += s;
  }
  const double n = static_cast<double>(benign.size());
  const double m = static_cast<double>(poisoned.size());
  double sum = 0;
  for (const EncodedReport& r : poisoned) {
    LDPFIM_ASSIGN_OR_RETURN(bool s, Support(cfg, r, item));
    sum += (s ? 1.0 : 0.0) - benign_support / n;
  }
  return sum / ((n + m) * (cfg.p - cfg.q));
}

double ExpectedMaxSupport(uint32_t h, uint32_t b, double alpha) {
  if (b == 0 || alpha <= 0) return 0;
  if (alpha >= 1) return b;
  // upper[i] = P[X > i]; summed from the top for accuracy in the tail.
  const double la = std::log(alpha);
  const double lb = std::log1p(-alpha);
  std::vector<double> pmf(b + 1);
  for (uint32_t x = 0; x <= b; ++x) {
    pmf[x] = std::exp(std::lgamma(b + 1.0) - std::lgamma(x + 1.0) -
                      std::lgamma(b - x + 1.0) + x * la + (b - x) * lb);
  }
  double expect = 0;
  double upper = 0;
  for (int64_t i = b - 1; i >= 0; --i) {
    upper += pmf[i + 1];
    const double cdf_pow =
        upper >= 1 ? 0.0 : std::exp(static_cast<double>(h) * std::log1p(-upper));
    expect += 1 - cdf_pow;
  }
  return expect;
}

ResourceEstimate EstimateResources(const FOConfig& cfg, uint32_t m,
                                   uint32_t target_size, uint32_t h,
                                   double population, double scale) {
  ResourceEstimate r;
  r.fo = cfg.kind;
  r.per_report_increment = scale / (population * (cfg.p - cfg.q));
  switch (cfg.kind) {
    case FOKind::kGrr:
      r.expected_supports = m;
      break;
    case FOKind::kOlh:
    case FOKind::kSh:
      r.expected_supports =
          target_size == 0
              ? 0
              : m * (1 + ExpectedMaxSupport(h, target_size - 1, cfg.q));
      break;
    case FOKind::kRappor:
      r.expected_supports = static_cast<double>(m) * target_size;
      break;
    case FOKind::kPrivSet:
      r.expected_supports =
          static_cast<double>(m) * std::min(target_size, cfg.kappa);
      break;
  }
  return r;
}

double TargetBudget(const FOConfig& cfg, uint32_t m, uint32_t target_size,
                    uint32_t h, double inc) {
  const ResourceEstimate r = EstimateResources(cfg, m, target_size, h, 1.0);
  double supports = r.expected_supports;
  if (cfg.kind == FOKind::kOlh || cfg.kind == FOKind::kSh) {
    // Every hash report also lifts each target by q on average, which the
    // water-filling update subtracts again.
    supports -= static_cast<double>(m) * target_size * cfg.q;
  }
  return std::max(supports, 0.0) * inc;
}

absl::StatusOr<TargetSet> RefineTargets(
    std::span<const double> benign_freqs, uint32_t k,
    const std::function<double(uint32_t)>& budget) {
  const uint32_t n = static_cast<uint32_t>(benign_freqs.size());
  if (k < 1 || n < k + 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "target refinement needs more than k = %d elements, got %d", k, n));
  }
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (benign_freqs[a] != benign_freqs[b]) {
      return benign_freqs[a] > benign_freqs[b];
    }
    return a < b;
  });
  TargetSet out;
  for (uint32_t L = std::min(k, n - k); L >= 1; --L) {
    const double b = budget(L);
    if (b < 0) {
      if (L == std::min(k, n - k) && std::isnan(b)) {
        return absl::InvalidArgumentError("budget is not a number");
      }
      continue;
    }
    const double pivot = benign_freqs[order[k - L]];
    double cost = 0;
    for (uint32_t i = 1; i <= L; ++i) cost += pivot - benign_freqs[order[k + i - 1]];
    if (cost <= b) {
      out.pivot_rank = k + 1 - L;
      out.cost = cost;
      for (uint32_t i = 1; i <= L; ++i) {
        const uint32_t e = order[k + i - 1];
        out.elements.push_back(e);
        out.gaps.push_back(std::max(pivot - benign_freqs[e], 0.0));
      }
      return out;
    }
  }
  return out;
}

absl::StatusOr<TargetSet> RefineTargets(std::span<const double> benign_freqs,
                                        uint32_t k, double budget) {
  if (budget < 0) return absl::InvalidArgumentError("negative budget");
  return RefineTargets(benign_freqs, k, [budget](uint32_t) { return budget; });
}

HashReport SampleAxis(const FOConfig& cfg, uint32_t axis,
                      std::span<const uint32_t> targets, uint32_t h,
                      Rng& rng) {
  HashReport best;
  int best_sup = -1;
  for (uint32_t i = 0; i < std::max(h, 1u); ++i) {
    const uint64_t r = rng();
    const SeededHash hash(r, cfg.g);
    const uint32_t v = hash(axis);
    int sup = 0;
    for (uint32_t t : targets) sup += hash(t) == v;
    if (sup > best_sup) {
      best_sup = sup;
      best = HashReport{r, v};
      if (sup == static_cast<int>(targets.size())) break;
    }
  }
  return best;
}

namespace {

// Target order for greedy allocation: larger gap first, then lower index.
std::vector<size_t> ByGap(const std::vector<double>& gaps,
                          std::span<const uint32_t> elements) {
  std::vector<size_t> order(gaps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (gaps[a] != gaps[b]) return gaps[a] > gaps[b];
    return elements[a] < elements[b];
  });
  return order;
}

uint32_t CeilDiv(double gap, double inc) {
  if (gap <= 0) return 0;
  return static_cast<uint32_t>(std::ceil(gap / inc - 1e-9));
}

// A kappa-set holding `chosen` and, if short, the highest-index other slots.
SetReport FillSet(const FOConfig& cfg, std::vector<uint32_t> chosen) {
  std::sort(chosen.begin(), chosen.end());
  std::vector<uint32_t> out = chosen;
  for (int64_t e = static_cast<int64_t>(cfg.d) - 1;
       out.size() < cfg.kappa && e >= 0; --e) {
    if (!std::binary_search(chosen.begin(), chosen.end(),
                            static_cast<uint32_t>(e))) {
      out.push_back(static_cast<uint32_t>(e));
    }
  }
  std::sort(out.begin(), out.end());
  return SetReport{std::move(out)};
}

BitVector TargetBits(const FOConfig& cfg, std::span<const uint32_t> targets) {
  BitVector bits(cfg.d);
  for (uint32_t t : targets) bits.Set(t);
  return bits;
}

}  // namespace

absl::StatusOr<std::vector<EncodedReport>> GeneratePoisonedReports(
    const FOConfig& cfg, const TargetSet& targets, double inc, uint32_t m,
    const PdgenOptions& options, Rng& rng) {
  for (uint32_t e : targets.elements) {
    if (e >= cfg.d) return absl::OutOfRangeError("target outside FO domain");
  }
  if (!(inc > 0)) return absl::InvalidArgumentError("increment must be > 0");
  std::vector<EncodedReport> out;
  const size_t L = targets.size();
  if (L == 0 || m == 0) return out;
  std::vector<double> gaps = targets.gaps;
  const auto& elems = targets.elements;

  switch (cfg.kind) {
    case FOKind::kGrr: {
      const std::vector<size_t> order = ByGap(gaps, elems);
      uint32_t left = m;
      for (size_t i : order) {
        const uint32_t c = std::min(CeilDiv(gaps[i], inc), left);
        for (uint32_t j = 0; j < c; ++j) out.push_back(GrrReport{elems[i]});
        left -= c;
      }
      for (size_t j = 0; options.spend_all && left > 0; ++j, --left) {
        out.push_back(GrrReport{elems[order[j % L]]});
      }
      break;
    }
    case FOKind::kOlh:
    case FOKind::kSh: {
      std::vector<uint32_t> active;
      while (out.size() < m) {
        size_t axis = 0;
        for (size_t i = 1; i < L; ++i) {
          if (gaps[i] > gaps[axis] ||
              (gaps[i] == gaps[axis] && elems[i] < elems[axis])) {
            axis = i;
          }
        }
        if (gaps[axis] <= 0 && !options.spend_all) break;
        active.clear();
        for (size_t i = 0; i < L; ++i) {
          if (gaps[i] > 0 || gaps[axis] <= 0) active.push_back(elems[i]);
        }
        const HashReport y = SampleAxis(cfg, elems[axis], active, options.h, rng);
        const SeededHash hash(y.seed, cfg.g);
        for (size_t i = 0; i < L; ++i) {
          const double s = hash(elems[i]) == y.hashed ? 1.0 : 0.0;
          gaps[i] -= inc * (s - cfg.q);
        }
        out.push_back(y);
      }
      break;
    }
    case FOKind::kRappor: {
      uint32_t need = 0;
      for (double g : gaps) need = std::max(need, CeilDiv(g, inc));
      const uint32_t count = options.spend_all ? m : std::min(m, need);
      for (uint32_t j = 0; j < count; ++j) out.push_back(TargetBits(cfg, elems));
      break;
    }
    case FOKind::kPrivSet: {
      const uint32_t per = std::min<uint32_t>(cfg.kappa, L);
      while (out.size() < m) {
        const std::vector<size_t> order = ByGap(gaps, elems);
        if (gaps[order[0]] <= 0 && !options.spend_all) break;
        std::vector<uint32_t> chosen;
        for (uint32_t j = 0; j < per; ++j) {
          chosen.push_back(elems[order[j]]);
          gaps[order[j]] -= inc;
        }
        out.push_back(FillSet(cfg, std::move(chosen)));
      }
      break;
    }
  }
  return out;
}

absl::StatusOr<std::vector<EncodedReport>> GenerateUniformReports(
    const FOConfig& cfg, std::span<const uint32_t> targets, uint32_t m,
    const PdgenOptions& options, Rng& rng) {
  for (uint32_t e : targets) {
    if (e >= cfg.d) return absl::OutOfRangeError("target outside FO domain");
  }
  std::vector<EncodedReport> out;
  const size_t L = targets.size();
  if (L == 0) return out;
  out.reserve(m);
  switch (cfg.kind) {
    case FOKind::kGrr:
      for (uint32_t j = 0; j < m; ++j) out.push_back(GrrReport{targets[j % L]});
      break;
    case FOKind::kOlh:
    case FOKind::kSh: {
      std::vector<uint32_t> hashed(L);
      for (uint32_t j = 0; j < m; ++j) {
        HashReport best;
        size_t best_count = 0;
        for (uint32_t i = 0; i < std::max(options.h, 1u); ++i) {
          const uint64_t r = rng();
          const SeededHash hash(r, cfg.g);
          for (size_t t = 0; t < L; ++t) hashed[t] = hash(targets[t]);
          std::sort(hashed.begin(), hashed.end());
          for (size_t a = 0; a < L;) {
            size_t b = a;
            while (b < L && hashed[b] == hashed[a]) ++b;
            if (b - a > best_count) {
              best_count = b - a;
              best = HashReport{r, hashed[a]};
            }
            a = b;
          }
        }
        out.push_back(best);
      }
      break;
    }
    case FOKind::kRappor:
      for (uint32_t j = 0; j < m; ++j) out.push_back(TargetBits(cfg, targets));
      break;
    case FOKind::kPrivSet: {
      const uint32_t per = std::min<uint32_t>(cfg.kappa, L);
      for (uint32_t j = 0; j < m; ++j) {
        std::vector<uint32_t> chosen;
        for (uint32_t i = 0; i < per; ++i) {
          chosen.push_back(targets[(static_cast<size_t>(j) * per + i) % L]);
        }
        std::sort(chosen.begin(), chosen.end());
        chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
        out.push_back(FillSet(cfg, std::move(chosen)));
      }
      break;
    }
  }
  return out;
}

absl::StatusOr<std::vector<double>> EstimateItemKnowledge(
    const ThreatModel& threat, const TransactionDb& db,
    std::span<const uint32_t> known_users,
    std::span<const EncodedReport> intercepted, const FOConfig& cfg) {
  if (threat.kind == ThreatModel::Kind::kMitm) {
    if (intercepted.empty()) {
      return absl::FailedPreconditionError("no intercepted reports");
    }
    LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est,
                            EstimateFrequencies(cfg, intercepted));
    est.resize(std::min<size_t>(est.size(), db.d()));
    return est;
  }
  if (known_users.empty()) {
    return absl::FailedPreconditionError("no known transactions");
  }
  std::vector<double> freqs(db.d(), 0.0);
  for (uint32_t u : known_users) {
    for (uint32_t item : db.transaction(u)) freqs[item] += 1;
  }
  for (double& f : freqs) f /= known_users.size();
  return freqs;
}

namespace {

class Adversary : public AdversaryHook {
 public:
  Adversary(const AttackSpec& spec, ProtocolKind protocol,
            const TransactionDb& db, std::span<const uint8_t> corrupted)
      : spec_(spec), protocol_(protocol), db_(db) {
    (void)corrupted;
    if (spec.threat.kind == ThreatModel::Kind::kPartial) {
      for (uint32_t u = 0; u < db.n(); ++u) {
        if (Picked(u, 0x5eed)) known_.push_back(u);
      }
      if (known_.empty()) known_.push_back(0);
    }
  }

  absl::StatusOr<PhaseResponse> Respond(const PhaseContext& ctx) override;

 private:
  // Deterministic per-user coin with probability threat.fraction.
  bool Picked(uint32_t user, uint64_t salt) const {
    const uint64_t h = Mix64(spec_.seed ^ Mix64(user ^ (salt << 32)));
    return static_cast<double>(h >> 11) * 0x1.0p-53 < spec_.threat.fraction;
  }

  Rng PhaseRng(const PhaseContext& ctx) const {
    return Rng(spec_.seed).Child(static_cast<uint64_t>(ctx.stage) * 16 +
                                 static_cast<uint64_t>(ctx.phase));
  }

  // Benign contribution to each element's final estimate, in the units the
  // aggregator ranks by.
  absl::StatusOr<std::vector<double>> BenignView(const PhaseContext& ctx);
  // Replaces a noisy interception estimate over a candidate item domain by
  // the first whole-domain estimate, rescaled to this round's total mass.
  void ApplyPrior(const PhaseContext& ctx, std::vector<double>& phi);

  absl::StatusOr<TargetSet> AoaTargets(const PhaseContext& ctx,
                                       std::span<const double> view,
                                       double inc) const;
  std::vector<uint32_t> ItemsOf(const PhaseContext& ctx,
                                std::span<const uint32_t> elements) const;
  std::vector<std::vector<uint32_t>> SubstitutedInputs(
      const PhaseContext& ctx) const;
  absl::StatusOr<PhaseResponse> RandomReports(const PhaseContext& ctx) const;
  absl::StatusOr<PhaseResponse> Length(const PhaseContext& ctx) const;
  absl::StatusOr<PhaseResponse> Membership(const PhaseContext& ctx);
  absl::StatusOr<PhaseResponse> Element(const PhaseContext& ctx);

  AttackSpec spec_;
  ProtocolKind protocol_;
  const TransactionDb& db_;
  std::vector<uint32_t> known_;
  std::vector<double> item_prior_;
};

absl::StatusOr<std::vector<double>> Adversary::BenignView(
    const PhaseContext& ctx) {
  const uint32_t size = ctx.domain->size();
  const double nb = static_cast<double>(ctx.benign_users.size());
  const double share = nb / ctx.num_reports();
  std::vector<double> phi(size, 0.0);
  const bool membership = ctx.phase == Phase::kMembership;

  if (spec_.threat.kind == ThreatModel::Kind::kMitm) {
    if (membership) {
      std::vector<double> asked(size, 0), yes(size, 0);
      for (size_t i = 0; i < ctx.benign_users.size(); ++i) {
        if (!Picked(ctx.benign_users[i], 0x317)) continue;
        asked[ctx.benign_queries[i]] += 1;
        yes[ctx.benign_queries[i]] +=
            std::get<GrrReport>(ctx.benign_reports[i]).item == 1;
      }
      for (uint32_t c = 0; c < size; ++c) {
        if (asked[c] > 0) phi[c] = EstimateFromCount(*ctx.fo, yes[c], asked[c]);
      }
    } else {
      std::vector<EncodedReport> seen;
      for (size_t i = 0; i < ctx.benign_users.size(); ++i) {
        if (Picked(ctx.benign_users[i], 0x317)) {
          seen.push_back(ctx.benign_reports[i]);
        }
      }
      if (seen.empty()) {
        return absl::FailedPreconditionError("no intercepted reports");
      }
      LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est,
                              EstimateFrequencies(*ctx.fo, seen));
      std::copy(est.begin(), est.begin() + size, phi.begin());
    }
    ApplyPrior(ctx, phi);
  } else {
    std::span<const uint32_t> users =
        spec_.threat.kind == ThreatModel::Kind::kFull
            ? ctx.benign_users
            : std::span<const uint32_t>(known_);
    std::vector<uint32_t> held;
    const double l = ctx.padding_l;
    for (uint32_t u : users) {
      ctx.domain->Held(db_.transaction(u), held);
      if (held.empty()) continue;
      double w;
      if (membership) {
        w = 1.0;
      } else if (ctx.fo->kind == FOKind::kPrivSet) {
        w = std::min(1.0, l / held.size());
      } else {
        w = 1.0 / std::max<double>(held.size(), l);
      }
      for (uint32_t e : held) phi[e] += w;
    }
    if (!users.empty()) {
      for (double& f : phi) f /= users.size();
    }
  }
  for (double& f : phi) f *= share * ctx.scale;
  return phi;
}

void Adversary::ApplyPrior(const PhaseContext& ctx, std::vector<double>& phi) {
  const ElementDomain& dom = *ctx.domain;
  if (dom.is_itemsets()) return;
  if (dom.items().empty()) {
    if (item_prior_.empty()) item_prior_ = phi;
    return;
  }
  if (item_prior_.empty()) return;
  double direct = 0, proxy = 0;
  for (uint32_t e = 0; e < dom.size(); ++e) {
    direct += phi[e];
    proxy += std::max(item_prior_[dom.items()[e]], 0.0);
  }
  if (!(direct > 0 && proxy > 0)) return;
  for (uint32_t e = 0; e < dom.size(); ++e) {
    phi[e] = std::max(item_prior_[dom.items()[e]], 0.0) * direct / proxy;
  }
}

absl::StatusOr<TargetSet> Adversary::AoaTargets(const PhaseContext& ctx,
                                               std::span<const double> view,
                                               double inc) const {
  const uint32_t k = ctx.output_size;
  const uint32_t m = static_cast<uint32_t>(ctx.corrupted_users.size());
  std::function<double(uint32_t)> budget;
  if (ctx.phase == Phase::kMembership) {
    budget = [inc](uint32_t L) { return L * inc; };
  } else {
    const FOConfig& fo = *ctx.fo;
    const uint32_t h = spec_.h;
    budget = [&fo, m, h, inc](uint32_t L) {
      return TargetBudget(fo, m, L, h, inc);
    };
  }
  LDPFIM_ASSIGN_OR_RETURN(TargetSet t, RefineTargets(view, k, budget));
  if (t.size() == 0) {
    // Nothing is affordable in expectation; still press the first contender.
    LDPFIM_ASSIGN_OR_RETURN(
        t, RefineTargets(view, k, [](uint32_t L) {
          return L == 1 ? std::numeric_limits<double>::infinity() : -1.0;
        }));
  }
  return t;
}

std::vector<uint32_t> Adversary::ItemsOf(
    const PhaseContext& ctx, std::span<const uint32_t> elements) const {
  std::vector<uint32_t> items;
  const ElementDomain& dom = *ctx.domain;
  for (uint32_t e : elements) {
    if (e >= dom.size()) continue;
    if (dom.is_itemsets()) {
      const auto& set = dom.itemsets()[e].items();
      items.insert(items.end(), set.begin(), set.end());
    } else if (dom.items().empty()) {
      items.push_back(e);
    } else {
      items.push_back(dom.items()[e]);
    }
  }
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

std::vector<std::vector<uint32_t>> Adversary::SubstitutedInputs(
    const PhaseContext& ctx) const {
  std::vector<std::vector<uint32_t>> inputs;
  const uint32_t d = db_.d();
  for (uint32_t u : ctx.corrupted_users) {
    Rng rng = Rng(spec_.seed ^ 0x52534aULL).Child(u);
    const uint32_t len = static_cast<uint32_t>(db_.transaction(u).size());
    std::vector<uint32_t> tx;
    std::vector<char> used(d, 0);
    for (uint32_t t = d - len; t < d; ++t) {
      uint32_t r = static_cast<uint32_t>(rng.UniformInt(t + 1));
      if (used[r]) r = t;
      used[r] = 1;
      tx.push_back(r);
    }
    std::sort(tx.begin(), tx.end());
    inputs.push_back(std::move(tx));
  }
  return inputs;
}

absl::StatusOr<PhaseResponse> Adversary::RandomReports(
    const PhaseContext& ctx) const {
  PhaseResponse resp;
  if (ctx.input_only) {
    // Crafted reports are refused; fall back to random inputs.
    resp.mode = PhaseResponse::Mode::kInputs;
    resp.inputs = SubstitutedInputs(ctx);
    return resp;
  }
  resp.mode = PhaseResponse::Mode::kReports;
  const FOConfig& fo = *ctx.fo;
  Rng rng = PhaseRng(ctx);
  for (size_t i = 0; i < ctx.corrupted_users.size(); ++i) {
    switch (fo.kind) {
      case FOKind::kGrr:
        resp.reports.push_back(
            GrrReport{static_cast<uint32_t>(rng.UniformInt(fo.d))});
        break;
      case FOKind::kOlh:
      case FOKind::kSh:
        resp.reports.push_back(
            HashReport{rng(), static_cast<uint32_t>(rng.UniformInt(fo.g))});
        break;
      case FOKind::kRappor: {
        BitVector bits(fo.d);
        for (uint32_t b = 0; b < fo.d; ++b) {
          if (rng.Bernoulli(0.5)) bits.Set(b);
        }
        resp.reports.push_back(std::move(bits));
        break;
      }
      case FOKind::kPrivSet: {
        std::vector<uint32_t> items;
        std::vector<char> used(fo.d, 0);
        for (uint32_t t = fo.d - fo.kappa; t < fo.d; ++t) {
          uint32_t r = static_cast<uint32_t>(rng.UniformInt(t + 1));
          if (used[r]) r = t;
          used[r] = 1;
          items.push_back(r);
        }
        std::sort(items.begin(), items.end());
        resp.reports.push_back(SetReport{std::move(items)});
        break;
      }
    }
  }
  return resp;
}

absl::StatusOr<PhaseResponse> Adversary::Length(const PhaseContext& ctx) const {
  PhaseResponse resp;
  if (spec_.kind != AttackKind::kAoa) return resp;
  const FOConfig& fo = *ctx.fo;
  const uint32_t top = fo.d - 1;
  if (ctx.input_only) {
    resp.mode = PhaseResponse::Mode::kInputs;
    std::vector<uint32_t> all(ctx.domain->size());
    std::iota(all.begin(), all.end(), 0);
    resp.inputs.assign(ctx.corrupted_users.size(), ItemsOf(ctx, all));
    return resp;
  }
  resp.mode = PhaseResponse::Mode::kReports;
  if (fo.kind == FOKind::kGrr) {
    resp.reports.assign(ctx.corrupted_users.size(), GrrReport{top});
    return resp;
  }
  // Support the longest length plus as many other upper-half lengths as a
  // seed search can reach.
  std::vector<uint32_t> upper;
  for (uint32_t v = fo.d / 2; v <= top; ++v) upper.push_back(v);
  Rng rng = PhaseRng(ctx);
  for (size_t i = 0; i < ctx.corrupted_users.size(); ++i) {
    resp.reports.push_back(SampleAxis(fo, top, upper, spec_.h, rng));
  }
  return resp;
}

absl::StatusOr<PhaseResponse> Adversary::Membership(
    const PhaseContext& ctx) {
  LDPFIM_ASSIGN_OR_RETURN(std::vector<double> view, BenignView(ctx));
  const double m = ctx.corrupted_users.size();
  const double inc = m / (ctx.num_reports() * (ctx.fo->p - ctx.fo->q));
  std::vector<uint32_t> targets;
  if (view.size() <= ctx.output_size) return PhaseResponse{};
  if (spec_.kind == AttackKind::kMgaR) {
    std::vector<uint32_t> ranked = TopKItems(view, view.size());
    std::vector<uint32_t> rest(ranked.begin() + ctx.output_size, ranked.end());
    Rng rng = PhaseRng(ctx);
    const size_t want = std::min<size_t>(ctx.advertised_k, rest.size());
    for (size_t i = 0; i < want; ++i) {
      std::swap(rest[i], rest[i + rng.UniformInt(rest.size() - i)]);
    }
    targets.assign(rest.begin(), rest.begin() + want);
  } else {
    LDPFIM_ASSIGN_OR_RETURN(TargetSet t, AoaTargets(ctx, view, inc));
    targets = t.elements;
  }
  std::sort(targets.begin(), targets.end());
  PhaseResponse resp;
  if (ctx.input_only) {
    resp.mode = PhaseResponse::Mode::kInputs;
    resp.inputs.assign(ctx.corrupted_users.size(), ItemsOf(ctx, targets));
    return resp;
  }
  resp.mode = PhaseResponse::Mode::kReports;
  for (uint32_t qy : ctx.corrupted_queries) {
    const bool hit = std::binary_search(targets.begin(), targets.end(), qy);
    resp.reports.push_back(GrrReport{hit ? 1u : 0u});
  }
  return resp;
}

absl::StatusOr<PhaseResponse> Adversary::Element(const PhaseContext& ctx) {
  const uint32_t size = ctx.domain->size();
  if (size <= ctx.output_size) return PhaseResponse{};
  LDPFIM_ASSIGN_OR_RETURN(std::vector<double> view, BenignView(ctx));
  const FOConfig& fo = *ctx.fo;
  const uint32_t m = static_cast<uint32_t>(ctx.corrupted_users.size());
  const double inc = ctx.scale / (ctx.num_reports() * (fo.p - fo.q));
  Rng rng = PhaseRng(ctx);
  PdgenOptions opts{spec_.h, /*spend_all=*/true, size};

  std::vector<uint32_t> target_elems;
  TargetSet targets;
  if (spec_.kind == AttackKind::kMgaR) {
    std::vector<uint32_t> ranked = TopKItems(view, size);
    std::vector<uint32_t> rest(ranked.begin() + ctx.output_size, ranked.end());
    const size_t want = std::min<size_t>(ctx.advertised_k, rest.size());
    for (size_t i = 0; i < want; ++i) {
      std::swap(rest[i], rest[i + rng.UniformInt(rest.size() - i)]);
    }
    target_elems.assign(rest.begin(), rest.begin() + want);
    std::sort(target_elems.begin(), target_elems.end());
  } else {
    LDPFIM_ASSIGN_OR_RETURN(targets, AoaTargets(ctx, view, inc));
    target_elems = targets.elements;
  }

  PhaseResponse resp;
  if (ctx.input_only) {
    resp.mode = PhaseResponse::Mode::kInputs;
    resp.inputs.assign(m, ItemsOf(ctx, target_elems));
    return resp;
  }
  resp.mode = PhaseResponse::Mode::kReports;
  if (spec_.kind == AttackKind::kAoa) {
    LDPFIM_ASSIGN_OR_RETURN(resp.reports, GeneratePoisonedReports(
                                              fo, targets, inc, m, opts, rng));
  } else {
    LDPFIM_ASSIGN_OR_RETURN(resp.reports, GenerateUniformReports(
                                              fo, target_elems, m, opts, rng));
  }
  return resp;
}

absl::StatusOr<PhaseResponse> Adversary::Respond(const PhaseContext& ctx) {
  switch (spec_.kind) {
    case AttackKind::kNone:
      return PhaseResponse{};
    case AttackKind::kRra:
      return RandomReports(ctx);
    case AttackKind::kRsa: {
      PhaseResponse resp;
      resp.mode = PhaseResponse::Mode::kInputs;
      resp.inputs = SubstitutedInputs(ctx);
      return resp;
    }
    case AttackKind::kAoa:
    case AttackKind::kMgaR:
    case AttackKind::kMgaAdv:
      break;
  }
  switch (ctx.phase) {
    case Phase::kLength:
      return Length(ctx);
    case Phase::kMembership:
      return Membership(ctx);
    default:
      return Element(ctx);
  }
}

}  // namespace

absl::StatusOr<std::unique_ptr<AdversaryHook>> BuildAttack(
    const AttackSpec& spec, ProtocolKind protocol, const TransactionDb& db,
    std::span<const uint8_t> corrupted) {
  if (spec.kind == AttackKind::kNone) return std::unique_ptr<AdversaryHook>();
  if (spec.threat.kind != ThreatModel::Kind::kFull &&
      !(spec.threat.fraction > 0 && spec.threat.fraction <= 1)) {
    return absl::InvalidArgumentError("threat fraction outside (0, 1]");
  }
  return std::unique_ptr<AdversaryHook>(
      new Adversary(spec, protocol, db, corrupted));
}

}  // namespace ldpfim
