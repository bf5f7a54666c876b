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
#include <functional>
#include <numeric>
#include <queue>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "ldpfim/defense.h"
#include "ldpfim/status_macros.h"

namespace ldpfim {

absl::string_view ProtocolName(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kLdpMiner:
      return "LDPMINER";
    case ProtocolKind::kSvim:
      return "SVIM";
    case ProtocolKind::kSvsm:
      return "SVSM";
    case ProtocolKind::kFimlI:
      return "FIML_I";
    case ProtocolKind::kFimlIs:
      return "FIML_IS";
    case ProtocolKind::kPrivSetTopK:
      return "PRIVSET_TOPK";
  }
  return "?";
}

absl::StatusOr<ProtocolKind> ParseProtocol(absl::string_view name) {
  for (ProtocolKind k :
       {ProtocolKind::kLdpMiner, ProtocolKind::kSvim, ProtocolKind::kSvsm,
        ProtocolKind::kFimlI, ProtocolKind::kFimlIs,
        ProtocolKind::kPrivSetTopK}) {
    if (name == ProtocolName(k)) return k;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown protocol '%s'", name));
}

bool MinesItemsets(ProtocolKind kind) {
  return kind == ProtocolKind::kSvsm || kind == ProtocolKind::kFimlIs;
}

absl::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kPrune:
      return "prune";
    case Phase::kLength:
      return "length";
    case Phase::kSelect:
      return "select";
    case Phase::kMembership:
      return "membership";
    case Phase::kSingle:
      return "single";
  }
  return "?";
}

std::string PhaseAudit::ToString() const {
  return absl::StrFormat(
      "%s/%d fo=%s eps=%g domain=%d l=%d candidates=%d benign=%d "
      "corrupted=%d dropped=%d",
      PhaseName(phase), stage, FOKindName(fo), epsilon, fo_domain, padding_l,
      candidates, benign_reports, corrupted_reports, dropped);
}

FOKind ChooseFo(uint32_t d, uint32_t l, double epsilon) {
  const double threshold = l * (4.0 * l - 1) * std::exp(epsilon) + 1;
  return d >= threshold ? FOKind::kOlh : FOKind::kGrr;
}

namespace {

// Smallest length whose cumulative clipped mass reaches the percentile.
uint32_t PercentileLength(std::vector<double> est, double percentile) {
  double total = 0;
  for (double& f : est) {
    f = std::max(f, 0.0);
    total += f;
  }
  if (total <= 0) return 1;
  double acc = 0;
  for (uint32_t v = 0; v < est.size(); ++v) {
    acc += est[v] / total;
    if (acc >= percentile - 1e-9) return v + 1;
  }
  return static_cast<uint32_t>(est.size());
}

}  // namespace

absl::StatusOr<uint32_t> EstimatePaddingLength(
    const FOConfig& cfg, std::span<const EncodedReport> length_reports,
    double percentile) {
  LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est,
                          EstimateFrequencies(cfg, length_reports));
  return PercentileLength(std::move(est), percentile);
}

std::vector<std::pair<ItemsetKey, double>> SvsmGuessCandidates(
    std::span<const std::pair<uint32_t, double>> topk_items,
    uint32_t out_size) {
  std::vector<std::pair<ItemsetKey, double>> out;
  if (topk_items.empty()) return out;
  double fmax = 0;
  for (const auto& [item, f] : topk_items) fmax = std::max(fmax, f);
  // Items ordered by factor so that extending a node never raises its guess.
  struct Factor {
    uint32_t item;
    double factor;
  };
  std::vector<Factor> factors;
  for (const auto& [item, f] : topk_items) {
    factors.push_back({item, fmax > 0 ? 0.9 * std::max(f, 0.0) / fmax : 0.0});
  }
  std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) {
    if (a.factor != b.factor) return a.factor > b.factor;
    return a.item < b.item;
  });
  struct Node {
    double guess;
    std::vector<uint32_t> members;  // Positions into `factors`, ascending.
    std::vector<uint32_t> key;      // Sorted item ids.
  };
  auto worse = [](const Node& a, const Node& b) {
    if (a.guess != b.guess) return a.guess < b.guess;
    return a.key > b.key;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> frontier(worse);
  for (uint32_t i = 0; i < factors.size(); ++i) {
    frontier.push({factors[i].factor, {i}, {factors[i].item}});
  }
  while (out.size() < out_size && !frontier.empty()) {
    Node node = frontier.top();
    frontier.pop();
    for (uint32_t i = node.members.back() + 1; i < factors.size(); ++i) {
      Node child{node.guess * factors[i].factor, node.members, node.key};
      child.members.push_back(i);
      child.key.insert(
          std::upper_bound(child.key.begin(), child.key.end(), factors[i].item),
          factors[i].item);
      frontier.push(std::move(child));
    }
    out.emplace_back(ItemsetKey::FromSortedUnchecked(std::move(node.key)),
                     node.guess);
  }
  return out;
}

namespace {

struct UserGroup {
  std::vector<uint32_t> benign;
  std::vector<uint32_t> corrupted;
};

UserGroup SplitByCorruption(std::span<const uint32_t> users,
                            std::span<const uint8_t> corrupted) {
  UserGroup g;
  for (uint32_t u : users) {
    if (!corrupted.empty() && corrupted[u]) {
      g.corrupted.push_back(u);
    } else {
      g.benign.push_back(u);
    }
  }
  return g;
}

absl::StatusOr<std::vector<std::vector<uint32_t>>> Partition(
    std::span<const uint32_t> users, std::span<const double> shares, Rng rng) {
  std::vector<uint32_t> perm(users.begin(), users.end());
  for (size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.UniformInt(i)]);
  }
  const double total = std::accumulate(shares.begin(), shares.end(), 0.0);
  std::vector<std::vector<uint32_t>> groups;
  size_t begin = 0;
  for (size_t g = 0; g < shares.size(); ++g) {
    size_t end = g + 1 == shares.size()
                     ? perm.size()
                     : begin + static_cast<size_t>(std::floor(
                                   perm.size() * shares[g] / total));
    end = std::min(end, perm.size());
    if (end <= begin) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "%d users are too few for a %d-way group split", users.size(),
          shares.size()));
    }
    std::vector<uint32_t> group(perm.begin() + begin, perm.begin() + end);
    std::sort(group.begin(), group.end());
    groups.push_back(std::move(group));
    begin = end;
  }
  return groups;
}

absl::Status ValidateReport(const FOConfig& fo, const EncodedReport& r) {
  if (!ReportMatches(fo.kind, r)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "adversary report does not match oracle %s", FOKindName(fo.kind)));
  }
  switch (r.index()) {
    case 0:
      if (std::get<GrrReport>(r).item >= fo.d) {
        return absl::FailedPreconditionError("adversary GRR report range");
      }
      break;
    case 1:
      if (std::get<HashReport>(r).hashed >= fo.g) {
        return absl::FailedPreconditionError("adversary hash report range");
      }
      break;
    case 2:
      if (std::get<BitVector>(r).size != fo.d) {
        return absl::FailedPreconditionError("adversary bit vector length");
      }
      break;
    default: {
      const auto& items = std::get<SetReport>(r).items;
      if (items.size() != fo.kappa ||
          std::adjacent_find(items.begin(), items.end(),
                             [](uint32_t a, uint32_t b) { return a >= b; }) !=
              items.end() ||
          (!items.empty() && items.back() >= fo.d)) {
        return absl::FailedPreconditionError("adversary set report shape");
      }
    }
  }
  return absl::OkStatus();
}

// Positions of the `count` highest estimates, ties by ascending position.
std::vector<uint32_t> TopPositions(std::span<const double> est,
                                   uint32_t count) {
  return TopKItems(est, count);
}

class Runner {
 public:
  Runner(ProtocolKind kind, const TransactionDb& db, const MiningConfig& cfg,
         std::span<const uint8_t> corrupted, AdversaryHook* adversary)
      : kind_(kind),
        db_(db),
        cfg_(cfg),
        corrupted_(corrupted),
        adversary_(adversary) {}

  absl::StatusOr<MiningResult> Run(const Rng& rng);

 private:
  struct Round {
    Phase phase;
    int stage;
    const FOConfig* fo;
    const ElementDomain* domain;
    uint32_t l;
    double scale;
    uint32_t output_size;
  };

  absl::StatusOr<EncodedReport> HonestElementReport(
      const Round& round, std::span<const uint32_t> tx, Rng& rng,
      std::vector<uint32_t>& scratch) const;

  absl::StatusOr<PhaseResponse> Ask(const PhaseContext& ctx) const;

  // Shared tail of the element and length rounds: adversary response,
  // validation, filtering and aggregation into `est` (unscaled).
  absl::StatusOr<std::vector<double>> Collect(
      const Round& round, const UserGroup& group, Rng phase_rng,
      const std::function<absl::StatusOr<EncodedReport>(
          std::span<const uint32_t>, Rng&)>& honest);

  absl::StatusOr<std::vector<double>> ElementRound(const Round& round,
                                                   const UserGroup& group,
                                                   Rng phase_rng);
  absl::StatusOr<uint32_t> LengthRound(int stage, const ElementDomain& domain,
                                       uint32_t max_len,
                                       const UserGroup& group, Rng phase_rng);
  absl::StatusOr<std::vector<double>> MembershipRound(
      int stage, const ElementDomain& domain, uint32_t output_size,
      const UserGroup& group, Rng phase_rng);

  // Prune to `out_size` items over the whole item domain with l = 1.
  absl::StatusOr<std::vector<std::pair<uint32_t, double>>> PruneItems(
      int stage, FOKind fo, const UserGroup& group, uint32_t out_size,
      Rng phase_rng);

  absl::StatusOr<std::vector<std::pair<uint32_t, double>>> Svim(
      std::span<const uint32_t> users, int stage, Rng rng);

  FOKind Hashing(FOKind kind) const {
    return cfg_.force_grr ? FOKind::kGrr : kind;
  }

  uint32_t DefaultPadding() const {
    return cfg_.padding_l != 0 ? cfg_.padding_l
                               : LengthPercentile(db_, cfg_.percentile);
  }

  ProtocolKind kind_;
  const TransactionDb& db_;
  const MiningConfig& cfg_;
  std::span<const uint8_t> corrupted_;
  AdversaryHook* adversary_;
  MiningResult result_;
};

absl::StatusOr<PhaseResponse> Runner::Ask(const PhaseContext& ctx) const {
  if (adversary_ == nullptr || ctx.corrupted_users.empty()) {
    return PhaseResponse{};
  }
  LDPFIM_ASSIGN_OR_RETURN(PhaseResponse resp, adversary_->Respond(ctx));
  if (resp.mode == PhaseResponse::Mode::kReports) {
    if (ctx.input_only) {
      return absl::FailedPreconditionError(
          "adversary crafted reports while restricted to input substitution");
    }
    if (resp.reports.size() > ctx.corrupted_users.size()) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "adversary returned %d reports for %d corrupted users",
          resp.reports.size(), ctx.corrupted_users.size()));
    }
    for (const EncodedReport& r : resp.reports) {
      LDPFIM_RETURN_IF_ERROR(ValidateReport(*ctx.fo, r));
    }
  } else if (resp.mode == PhaseResponse::Mode::kInputs) {
    if (resp.inputs.size() != ctx.corrupted_users.size()) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "adversary returned %d inputs for %d corrupted users",
          resp.inputs.size(), ctx.corrupted_users.size()));
    }
    for (auto& tx : resp.inputs) {
      std::sort(tx.begin(), tx.end());
      tx.erase(std::unique(tx.begin(), tx.end()), tx.end());
      if (!tx.empty() && tx.back() >= db_.d()) {
        return absl::FailedPreconditionError("adversary input item range");
      }
    }
  }
  return resp;
}

absl::StatusOr<EncodedReport> Runner::HonestElementReport(
    const Round& round, std::span<const uint32_t> tx, Rng& rng,
    std::vector<uint32_t>& scratch) const {
  round.domain->Held(tx, scratch);
  const uint32_t size = round.domain->size();
  if (round.fo->kind == FOKind::kPrivSet) {
    std::vector<uint32_t> padded = PadTo(scratch, round.l, size, rng);
    return PerturbSet(*round.fo, padded, rng);
  }
  return Perturb(*round.fo, PadAndSample(scratch, round.l, size, rng), rng);
}

absl::StatusOr<std::vector<double>> Runner::Collect(
    const Round& round, const UserGroup& group, Rng phase_rng,
    const std::function<absl::StatusOr<EncodedReport>(std::span<const uint32_t>,
                                                      Rng&)>& honest) {
  std::vector<EncodedReport> reports;
  reports.reserve(group.benign.size() + group.corrupted.size());
  for (uint32_t u : group.benign) {
    Rng user_rng = phase_rng.Child(u);
    LDPFIM_ASSIGN_OR_RETURN(EncodedReport r,
                            honest(db_.transaction(u), user_rng));
    reports.push_back(std::move(r));
  }
  PhaseContext ctx;
  ctx.protocol = kind_;
  ctx.phase = round.phase;
  ctx.stage = round.stage;
  ctx.fo = round.fo;
  ctx.domain = round.domain;
  ctx.padding_l = round.l;
  ctx.scale = round.scale;
  ctx.advertised_k = cfg_.AdvertisedK();
  ctx.output_size = round.output_size;
  ctx.benign_users = group.benign;
  ctx.corrupted_users = group.corrupted;
  ctx.benign_reports = reports;
  ctx.input_only = cfg_.input_only;
  LDPFIM_ASSIGN_OR_RETURN(PhaseResponse resp, Ask(ctx));
  for (size_t i = 0; i < group.corrupted.size(); ++i) {
    const uint32_t u = group.corrupted[i];
    Rng user_rng = phase_rng.Child(u);
    if (resp.mode == PhaseResponse::Mode::kReports && i < resp.reports.size()) {
      reports.push_back(std::move(resp.reports[i]));
      continue;
    }
    std::span<const uint32_t> tx = resp.mode == PhaseResponse::Mode::kInputs
                                       ? std::span<const uint32_t>(resp.inputs[i])
                                       : db_.transaction(u);
    LDPFIM_ASSIGN_OR_RETURN(EncodedReport r, honest(tx, user_rng));
    reports.push_back(std::move(r));
  }

  PhaseAudit audit;
  audit.phase = round.phase;
  audit.stage = round.stage;
  audit.fo = round.fo->kind;
  audit.epsilon = round.fo->epsilon;
  audit.fo_domain = round.fo->d;
  audit.padding_l = round.l;
  audit.candidates = round.domain ? round.domain->size() : round.fo->d;
  audit.benign_reports = static_cast<uint32_t>(group.benign.size());
  audit.corrupted_reports = static_cast<uint32_t>(group.corrupted.size());
  if (cfg_.filter) {
    const double theta = cfg_.filter_theta.value_or(DefaultFilterTheta(*round.fo));
    FilterOutcome f = FilterReports(*round.fo, theta, std::move(reports));
    reports = std::move(f.kept);
    audit.dropped = f.dropped;
    result_.dropped_reports += f.dropped;
  }
  result_.audit.push_back(audit);
  if (reports.empty()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "no reports left in %s round", PhaseName(round.phase)));
  }
  return EstimateFrequencies(*round.fo, reports);
}

absl::StatusOr<std::vector<double>> Runner::ElementRound(
    const Round& round, const UserGroup& group, Rng phase_rng) {
  std::vector<uint32_t> scratch;
  auto honest = [&](std::span<const uint32_t> tx,
                    Rng& rng) -> absl::StatusOr<EncodedReport> {
    return HonestElementReport(round, tx, rng, scratch);
  };
  LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est,
                          Collect(round, group, phase_rng, honest));
  est.resize(round.domain->size());
  for (double& f : est) f *= round.scale;
  return est;
}

absl::StatusOr<uint32_t> Runner::LengthRound(int stage,
                                             const ElementDomain& domain,
                                             uint32_t max_len,
                                             const UserGroup& group,
                                             Rng phase_rng) {
  const FOKind kind = max_len < 2 ? FOKind::kGrr : Hashing(FOKind::kOlh);
  LDPFIM_ASSIGN_OR_RETURN(
      FOConfig fo, MakeConfig(kind, cfg_.epsilon, std::max(max_len, 2u)));
  Round round{Phase::kLength, stage, &fo, &domain, 1, 1.0, 1};
  std::vector<uint32_t> scratch;
  auto honest = [&](std::span<const uint32_t> tx,
                    Rng& rng) -> absl::StatusOr<EncodedReport> {
    domain.Held(tx, scratch);
    const uint32_t len = std::clamp<uint32_t>(
        static_cast<uint32_t>(scratch.size()), 1, std::max(max_len, 1u));
    return Perturb(fo, len - 1, rng);
  };
  LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est,
                          Collect(round, group, phase_rng, honest));
  const uint32_t l = PercentileLength(std::move(est), cfg_.percentile);
  result_.audit.back().padding_l = l;
  return std::min(l, std::max(max_len, 1u));
}

absl::StatusOr<std::vector<double>> Runner::MembershipRound(
    int stage, const ElementDomain& domain, uint32_t output_size,
    const UserGroup& group, Rng phase_rng) {
  LDPFIM_ASSIGN_OR_RETURN(FOConfig fo,
                          MakeConfig(FOKind::kGrr, cfg_.epsilon, 2));
  const uint32_t c = domain.size();
  auto query_of = [&](uint32_t u) {
    Rng r = phase_rng.Child(u).Child(0x9e37);
    return static_cast<uint32_t>(r.UniformInt(c));
  };
  auto answer = [&](std::span<const uint32_t> tx, uint32_t query) -> uint32_t {
    if (domain.is_itemsets()) {
      const auto& items = domain.itemsets()[query].items();
      return std::includes(tx.begin(), tx.end(), items.begin(), items.end());
    }
    return std::binary_search(tx.begin(), tx.end(), domain.items()[query]);
  };
  std::vector<EncodedReport> reports;
  std::vector<uint32_t> benign_q, corrupted_q;
  for (uint32_t u : group.benign) {
    const uint32_t qy = query_of(u);
    benign_q.push_back(qy);
    Rng rng = phase_rng.Child(u);
    LDPFIM_ASSIGN_OR_RETURN(EncodedReport r,
                            Perturb(fo, answer(db_.transaction(u), qy), rng));
    reports.push_back(std::move(r));
  }
  for (uint32_t u : group.corrupted) corrupted_q.push_back(query_of(u));

  PhaseContext ctx;
  ctx.protocol = kind_;
  ctx.phase = Phase::kMembership;
  ctx.stage = stage;
  ctx.fo = &fo;
  ctx.domain = &domain;
  ctx.advertised_k = cfg_.AdvertisedK();
  ctx.output_size = output_size;
  ctx.benign_users = group.benign;
  ctx.corrupted_users = group.corrupted;
  ctx.benign_reports = reports;
  ctx.benign_queries = benign_q;
  ctx.corrupted_queries = corrupted_q;
  ctx.input_only = cfg_.input_only;
  LDPFIM_ASSIGN_OR_RETURN(PhaseResponse resp, Ask(ctx));
  for (size_t i = 0; i < group.corrupted.size(); ++i) {
    const uint32_t u = group.corrupted[i];
    Rng rng = phase_rng.Child(u);
    if (resp.mode == PhaseResponse::Mode::kReports && i < resp.reports.size()) {
      reports.push_back(std::move(resp.reports[i]));
      continue;
    }
    std::span<const uint32_t> tx = resp.mode == PhaseResponse::Mode::kInputs
                                       ? std::span<const uint32_t>(resp.inputs[i])
                                       : db_.transaction(u);
    LDPFIM_ASSIGN_OR_RETURN(EncodedReport r,
                            Perturb(fo, answer(tx, corrupted_q[i]), rng));
    reports.push_back(std::move(r));
  }

  std::vector<double> asked(c, 0), yes(c, 0);
  for (size_t i = 0; i < reports.size(); ++i) {
    const uint32_t qy = i < benign_q.size() ? benign_q[i]
                                            : corrupted_q[i - benign_q.size()];
    asked[qy] += 1;
    yes[qy] += std::get<GrrReport>(reports[i]).item == 1;
  }
  std::vector<double> est(c, 0.0);
  for (uint32_t e = 0; e < c; ++e) {
    if (asked[e] > 0) est[e] = EstimateFromCount(fo, yes[e], asked[e]);
  }
  PhaseAudit audit;
  audit.phase = Phase::kMembership;
  audit.stage = stage;
  audit.fo = FOKind::kGrr;
  audit.epsilon = fo.epsilon;
  audit.fo_domain = 2;
  audit.candidates = c;
  audit.benign_reports = static_cast<uint32_t>(group.benign.size());
  audit.corrupted_reports = static_cast<uint32_t>(group.corrupted.size());
  result_.audit.push_back(audit);
  return est;
}

absl::StatusOr<std::vector<std::pair<uint32_t, double>>> Runner::PruneItems(
    int stage, FOKind kind, const UserGroup& group, uint32_t out_size,
    Rng phase_rng) {
  const uint32_t d = db_.d();
  LDPFIM_ASSIGN_OR_RETURN(FOConfig fo, MakeConfig(kind, cfg_.epsilon, d + 1));
  const ElementDomain all = ElementDomain::AllItems(d);
  Round round{Phase::kPrune, stage, &fo, &all, 1, 1.0, out_size};
  LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est,
                          ElementRound(round, group, phase_rng));
  std::vector<std::pair<uint32_t, double>> out;
  for (uint32_t item : TopPositions(est, out_size)) {
    out.emplace_back(item, est[item]);
  }
  return out;
}

std::vector<uint32_t> SortedItems(
    std::span<const std::pair<uint32_t, double>> ranked) {
  std::vector<uint32_t> items;
  for (const auto& [item, f] : ranked) items.push_back(item);
  std::sort(items.begin(), items.end());
  return items;
}

absl::StatusOr<std::vector<std::pair<uint32_t, double>>> Runner::Svim(
    std::span<const uint32_t> users, int stage, Rng rng) {
  const uint32_t k = std::min(cfg_.k, db_.d());
  const uint32_t two_k = std::min(2 * k, db_.d());
  LDPFIM_ASSIGN_OR_RETURN(auto groups,
                          Partition(users, cfg_.group_split, rng.Child(0)));
  if (groups.size() != 3) {
    return absl::InvalidArgumentError("SVIM needs a three-way group split");
  }
  const UserGroup g1 = SplitByCorruption(groups[0], corrupted_);
  const UserGroup g2 = SplitByCorruption(groups[1], corrupted_);
  const UserGroup g3 = SplitByCorruption(groups[2], corrupted_);

  LDPFIM_ASSIGN_OR_RETURN(
      auto pruned,
      PruneItems(stage, Hashing(ChooseFo(db_.d(), 1, cfg_.epsilon)), g1, two_k,
                 rng.Child(1)));
  const ElementDomain cand = ElementDomain::Items(db_.d(), SortedItems(pruned));

  LDPFIM_ASSIGN_OR_RETURN(uint32_t l,
                          LengthRound(stage, cand, two_k, g2, rng.Child(2)));

  const FOKind kind = Hashing(ChooseFo(two_k, l, cfg_.epsilon));
  LDPFIM_ASSIGN_OR_RETURN(FOConfig fo,
                          MakeConfig(kind, cfg_.epsilon, two_k + l));
  Round round{Phase::kSelect, stage, &fo, &cand, l, static_cast<double>(l), k};
  LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est,
                          ElementRound(round, g3, rng.Child(3)));
  std::vector<std::pair<uint32_t, double>> out;
  for (uint32_t pos : TopPositions(est, k)) {
    out.emplace_back(cand.items()[pos], est[pos]);
  }
  if (stage == 0 && kind_ == ProtocolKind::kSvim) {
    for (uint32_t item : cand.items()) {
      result_.candidates.push_back(ItemsetKey::FromSortedUnchecked({item}));
    }
  }
  return out;
}

absl::StatusOr<MiningResult> Runner::Run(const Rng& rng) {
  const uint32_t n = db_.n();
  if (!corrupted_.empty() && corrupted_.size() != n) {
    return absl::InvalidArgumentError("corruption mask size differs from n");
  }
  if (cfg_.k < 1) return absl::InvalidArgumentError("k must be >= 1");
  if (!(cfg_.epsilon > 0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  std::vector<uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const uint32_t k = std::min(cfg_.k, db_.d());
  auto emit_items = [&](std::span<const std::pair<uint32_t, double>> ranked) {
    for (const auto& [item, f] : ranked) {
      result_.topk.push_back(ItemsetKey::FromSortedUnchecked({item}));
      result_.estimates.push_back(f);
    }
  };

  switch (kind_) {
    case ProtocolKind::kSvim: {
      LDPFIM_ASSIGN_OR_RETURN(auto ranked, Svim(all, 0, rng));
      emit_items(ranked);
      break;
    }
    case ProtocolKind::kSvsm: {
      LDPFIM_ASSIGN_OR_RETURN(auto groups,
                              Partition(all, cfg_.group_split, rng.Child(10)));
      if (groups.size() != 3) {
        return absl::InvalidArgumentError("SVSM needs a three-way group split");
      }
      LDPFIM_ASSIGN_OR_RETURN(auto items, Svim(groups[0], 0, rng.Child(11)));
      const uint32_t two_k = 2 * cfg_.k;
      auto guesses = SvsmGuessCandidates(items, two_k);
      std::vector<ItemsetKey> keys;
      for (auto& [key, g] : guesses) keys.push_back(key);
      std::sort(keys.begin(), keys.end());
      const ElementDomain cand = ElementDomain::Itemsets(keys);
      const uint32_t size = cand.size();
      const UserGroup g2 = SplitByCorruption(groups[1], corrupted_);
      const UserGroup g3 = SplitByCorruption(groups[2], corrupted_);
      LDPFIM_ASSIGN_OR_RETURN(uint32_t l,
                              LengthRound(1, cand, size, g2, rng.Child(12)));
      const FOKind kind = Hashing(ChooseFo(size, l, cfg_.epsilon));
      LDPFIM_ASSIGN_OR_RETURN(FOConfig fo,
                              MakeConfig(kind, cfg_.epsilon, size + l));
      const uint32_t kk = std::min(cfg_.k, size);
      Round round{Phase::kSelect, 1, &fo, &cand, l, static_cast<double>(l), kk};
      LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est,
                              ElementRound(round, g3, rng.Child(13)));
      for (uint32_t pos : TopPositions(est, kk)) {
        result_.topk.push_back(keys[pos]);
        result_.estimates.push_back(est[pos]);
      }
      result_.candidates = keys;
      break;
    }
    case ProtocolKind::kLdpMiner: {
      const uint32_t l1 = DefaultPadding();
      const uint32_t two_k = std::min(2 * k, db_.d());
      const double eps1 = cfg_.epsilon * cfg_.budget_split;
      const double eps2 = cfg_.epsilon - eps1;
      const UserGroup everyone = SplitByCorruption(all, corrupted_);
      LDPFIM_ASSIGN_OR_RETURN(
          FOConfig fo1,
          MakeConfig(Hashing(FOKind::kSh), eps1, db_.d() + l1));
      const ElementDomain items = ElementDomain::AllItems(db_.d());
      Round prune{Phase::kPrune, 0, &fo1, &items, l1, static_cast<double>(l1),
                  two_k};
      LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est1,
                              ElementRound(prune, everyone, rng.Child(20)));
      std::vector<std::pair<uint32_t, double>> pruned;
      for (uint32_t t : TopPositions(est1, two_k)) pruned.emplace_back(t, est1[t]);
      const ElementDomain cand =
          ElementDomain::Items(db_.d(), SortedItems(pruned));
      const uint32_t l2 = two_k;
      LDPFIM_ASSIGN_OR_RETURN(
          FOConfig fo2, MakeConfig(FOKind::kRappor, eps2, two_k + l2));
      Round select{Phase::kSelect, 0, &fo2, &cand, l2, static_cast<double>(l2),
                   k};
      LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est2,
                              ElementRound(select, everyone, rng.Child(21)));
      std::vector<std::pair<uint32_t, double>> ranked;
      for (uint32_t pos : TopPositions(est2, k)) {
        ranked.emplace_back(cand.items()[pos], est2[pos]);
      }
      emit_items(ranked);
      for (uint32_t item : cand.items()) {
        result_.candidates.push_back(ItemsetKey::FromSortedUnchecked({item}));
      }
      break;
    }
    case ProtocolKind::kFimlI:
    case ProtocolKind::kFimlIs: {
      const double shares[] = {cfg_.fiml_split, 1 - cfg_.fiml_split};
      LDPFIM_ASSIGN_OR_RETURN(auto groups, Partition(all, shares, rng.Child(30)));
      const UserGroup g1 = SplitByCorruption(groups[0], corrupted_);
      const UserGroup g2 = SplitByCorruption(groups[1], corrupted_);
      const uint32_t c_size =
          static_cast<uint32_t>(std::ceil(1.5 * cfg_.k - 1e-9));
      if (kind_ == ProtocolKind::kFimlI) {
        LDPFIM_ASSIGN_OR_RETURN(
            auto pruned, PruneItems(0, Hashing(FOKind::kOlh), g1,
                                    std::min(c_size, db_.d()), rng.Child(31)));
        const ElementDomain cand =
            ElementDomain::Items(db_.d(), SortedItems(pruned));
        const uint32_t kk = std::min(cfg_.k, cand.size());
        LDPFIM_ASSIGN_OR_RETURN(
            std::vector<double> est,
            MembershipRound(0, cand, kk, g2, rng.Child(32)));
        std::vector<std::pair<uint32_t, double>> ranked;
        for (uint32_t pos : TopPositions(est, kk)) {
          ranked.emplace_back(cand.items()[pos], est[pos]);
        }
        emit_items(ranked);
        for (uint32_t item : cand.items()) {
          result_.candidates.push_back(ItemsetKey::FromSortedUnchecked({item}));
        }
      } else {
        LDPFIM_ASSIGN_OR_RETURN(
            auto items,
            PruneItems(0, Hashing(FOKind::kOlh), g1, k, rng.Child(31)));
        auto guesses = SvsmGuessCandidates(items, c_size);
        std::vector<ItemsetKey> keys;
        for (auto& [key, g] : guesses) keys.push_back(key);
        std::sort(keys.begin(), keys.end());
        const ElementDomain cand = ElementDomain::Itemsets(keys);
        const uint32_t kk = std::min(cfg_.k, cand.size());
        LDPFIM_ASSIGN_OR_RETURN(
            std::vector<double> est,
            MembershipRound(1, cand, kk, g2, rng.Child(32)));
        for (uint32_t pos : TopPositions(est, kk)) {
          result_.topk.push_back(keys[pos]);
          result_.estimates.push_back(est[pos]);
        }
        result_.candidates = keys;
      }
      break;
    }
    case ProtocolKind::kPrivSetTopK: {
      const uint32_t l = std::min(DefaultPadding(), db_.d() - 1);
      const UserGroup everyone = SplitByCorruption(all, corrupted_);
      LDPFIM_ASSIGN_OR_RETURN(
          FOConfig fo,
          MakeConfig(FOKind::kPrivSet, cfg_.epsilon, db_.d() + l, l));
      const ElementDomain items = ElementDomain::AllItems(db_.d());
      Round round{Phase::kSingle, 0, &fo, &items, l, 1.0, k};
      LDPFIM_ASSIGN_OR_RETURN(std::vector<double> est,
                              ElementRound(round, everyone, rng.Child(40)));
      std::vector<std::pair<uint32_t, double>> ranked;
      for (uint32_t t : TopPositions(est, k)) ranked.emplace_back(t, est[t]);
      emit_items(ranked);
      for (uint32_t t = 0; t < db_.d(); ++t) {
        result_.candidates.push_back(ItemsetKey::FromSortedUnchecked({t}));
      }
      break;
    }
  }
  return std::move(result_);
}

}  // namespace

absl::StatusOr<MiningResult> RunProtocol(ProtocolKind kind,
                                         const TransactionDb& db,
                                         const MiningConfig& cfg,
                                         std::span<const uint8_t> corrupted,
                                         AdversaryHook* adversary,
                                         const Rng& rng) {
  Runner runner(kind, db, cfg, corrupted, adversary);
  return runner.Run(rng);
}

}  // namespace ldpfim
