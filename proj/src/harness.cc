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

#include "ldpfim/harness.h"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "ldpfim/metrics.h"
#include "ldpfim/random.h"
#include "ldpfim/status_macros.h"

namespace ldpfim {

std::string DatasetSpec::Name() const {
  if (!path.empty()) {
    const size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
  }
  return absl::StrFormat("zipf-%g-len-%g-seed-%d", synthetic.zipf_exponent,
                         synthetic.mean_len, synthetic.seed);
}

absl::StatusOr<TransactionDb> DatasetSpec::Load() const {
  if (!path.empty()) return LoadDb(path, path_d);
  return GenerateSynthetic(synthetic);
}

std::string AttackChoice::Label() const {
  std::string label(AttackName(kind));
  if (kind != AttackKind::kNone && threat.kind != ThreatModel::Kind::kFull) {
    absl::StrAppend(&label, "@", threat.Name());
  }
  return label;
}

absl::StatusOr<AttackChoice> ParseAttackChoice(absl::string_view text) {
  AttackChoice c;
  std::vector<absl::string_view> parts = absl::StrSplit(text, '@');
  if (parts.size() > 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("malformed attack '%s'", text));
  }
  LDPFIM_ASSIGN_OR_RETURN(c.kind, ParseAttack(parts[0]));
  if (parts.size() == 2) {
    LDPFIM_ASSIGN_OR_RETURN(c.threat, ParseThreat(parts[1]));
  }
  return c;
}

namespace {

template <typename T, typename F>
absl::StatusOr<std::vector<T>> ParseList(absl::string_view value, F parse) {
  std::vector<T> out;
  for (absl::string_view part : absl::StrSplit(value, ',')) {
    part = absl::StripAsciiWhitespace(part);
    if (part.empty()) continue;
    absl::StatusOr<T> v = parse(part);
    if (!v.ok()) return v.status();
    out.push_back(*std::move(v));
  }
  if (out.empty()) return absl::InvalidArgumentError("empty list");
  return out;
}

absl::StatusOr<double> ParseDouble(absl::string_view s) {
  double v;
  if (!absl::SimpleAtod(s, &v)) {
    return absl::InvalidArgumentError(absl::StrFormat("not a number: '%s'", s));
  }
  return v;
}

absl::StatusOr<uint64_t> ParseU64(absl::string_view s) {
  uint64_t v;
  if (!absl::SimpleAtoi(s, &v)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("not a non-negative integer: '%s'", s));
  }
  return v;
}

absl::StatusOr<uint32_t> ParseU32(absl::string_view s) {
  uint32_t v;
  if (!absl::SimpleAtoi(s, &v)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("not a non-negative integer: '%s'", s));
  }
  return v;
}

absl::StatusOr<bool> ParseBool(absl::string_view s) {
  bool v;
  if (!absl::SimpleAtob(s, &v)) {
    return absl::InvalidArgumentError(absl::StrFormat("not a boolean: '%s'", s));
  }
  return v;
}

absl::StatusOr<std::vector<uint64_t>> ParseSeeds(absl::string_view value) {
  std::vector<uint64_t> out;
  for (absl::string_view part : absl::StrSplit(value, ',')) {
    part = absl::StripAsciiWhitespace(part);
    if (part.empty()) continue;
    const size_t dots = part.find("..");
    if (dots == absl::string_view::npos) {
      LDPFIM_ASSIGN_OR_RETURN(uint64_t s, ParseU64(part));
      out.push_back(s);
      continue;
    }
    LDPFIM_ASSIGN_OR_RETURN(uint64_t lo, ParseU64(part.substr(0, dots)));
    LDPFIM_ASSIGN_OR_RETURN(uint64_t hi, ParseU64(part.substr(dots + 2)));
    if (hi < lo || hi - lo > 1000000) {
      return absl::InvalidArgumentError(
          absl::StrFormat("bad seed range '%s'", part));
    }
    for (uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) return absl::InvalidArgumentError("empty seed list");
  return out;
}

template <typename T>
absl::Status Assign(absl::StatusOr<T> v, T& dst) {
  if (!v.ok()) return v.status();
  dst = *std::move(v);
  return absl::OkStatus();
}

}  // namespace

absl::Status SetConfigValue(ExperimentConfig& cfg, absl::string_view key,
                            absl::string_view value) {
  key = absl::StripAsciiWhitespace(key);
  value = absl::StripAsciiWhitespace(value);
  absl::Status st;
  SyntheticParams& syn = cfg.dataset.synthetic;
  if (key == "dataset") {
    cfg.dataset.path = std::string(value);
  } else if (key == "dataset_d") {
    uint32_t d = 0;
    st = Assign(ParseU32(value), d);
    cfg.dataset.path_d = d;
  } else if (key == "synthetic.n") {
    st = Assign(ParseU32(value), syn.n);
  } else if (key == "synthetic.d") {
    st = Assign(ParseU32(value), syn.d);
  } else if (key == "synthetic.zipf") {
    st = Assign(ParseDouble(value), syn.zipf_exponent);
  } else if (key == "synthetic.mean_len") {
    st = Assign(ParseDouble(value), syn.mean_len);
  } else if (key == "synthetic.max_len") {
    st = Assign(ParseU32(value), syn.max_len);
  } else if (key == "synthetic.seed") {
    st = Assign(ParseU64(value), syn.seed);
  } else if (key == "protocol") {
    st = Assign(ParseList<ProtocolKind>(value, ParseProtocol), cfg.protocols);
  } else if (key == "attack") {
    st = Assign(ParseList<AttackChoice>(value, ParseAttackChoice), cfg.attacks);
  } else if (key == "defense") {
    st = Assign(ParseList<Defense>(value, ParseDefense), cfg.defenses);
  } else if (key == "k") {
    st = Assign(ParseList<uint32_t>(value, ParseU32), cfg.ks);
  } else if (key == "epsilon") {
    st = Assign(ParseList<double>(value, ParseDouble), cfg.epsilons);
  } else if (key == "gamma") {
    st = Assign(ParseList<double>(value, ParseDouble), cfg.gammas);
  } else if (key == "seeds") {
    st = Assign(ParseSeeds(value), cfg.seeds);
  } else if (key == "h") {
    st = Assign(ParseU32(value), cfg.h);
  } else if (key == "inject") {
    st = Assign(ParseBool(value), cfg.inject);
  } else if (key == "timing") {
    st = Assign(ParseBool(value), cfg.timing);
  } else if (key == "max_cells") {
    st = Assign(ParseU64(value), cfg.max_cells);
  } else if (key == "percentile") {
    st = Assign(ParseDouble(value), cfg.mining.percentile);
  } else if (key == "padding_l") {
    st = Assign(ParseU32(value), cfg.mining.padding_l);
  } else if (key == "budget_split") {
    st = Assign(ParseDouble(value), cfg.mining.budget_split);
  } else if (key == "fiml_split") {
    st = Assign(ParseDouble(value), cfg.mining.fiml_split);
  } else {
    return absl::InvalidArgumentError(
        absl::StrFormat("unknown config key '%s'", key));
  }
  if (!st.ok()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("config key '%s': %s", key, st.message()));
  }
  for (double g : cfg.gammas) {
    if (!(g >= 0 && g < 1)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("gamma %g outside [0, 1)", g));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseConfig(absl::string_view text) {
  ExperimentConfig cfg;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != absl::string_view::npos) line = line.substr(0, hash);
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: expected key = value", line_no));
    }
    absl::Status st =
        SetConfigValue(cfg, line.substr(0, eq), line.substr(eq + 1));
    if (!st.ok()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: %s", line_no, st.message()));
    }
  }
  return cfg;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrFormat("cannot open '%s'", path));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

std::vector<Cell> ExpandCells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  for (ProtocolKind p : cfg.protocols) {
    for (const AttackChoice& a : cfg.attacks) {
      for (const Defense& def : cfg.defenses) {
        for (uint32_t k : cfg.ks) {
          for (double eps : cfg.epsilons) {
            for (double g : cfg.gammas) {
              cells.push_back(Cell{p, a, def, k, eps, g});
            }
          }
        }
      }
    }
  }
  return cells;
}

std::string CsvHeader() {
  return "protocol,attack,defense,dataset,n,d,k,epsilon,gamma,seed,acc,ncr,"
         "dropped_reports,runtime_ms";
}

std::string FormatRow(const ResultRow& r) {
  return absl::StrFormat("%s,%s,%s,%s,%d,%d,%d,%g,%g,%d,%.6f,%.6f,%d,%d",
                         r.protocol, r.attack, r.defense, r.dataset, r.n, r.d,
                         r.k, r.epsilon, r.gamma, r.seed, r.acc, r.ncr,
                         r.dropped_reports, r.runtime_ms);
}

absl::StatusOr<ResultRow> ParseRow(absl::string_view line) {
  std::vector<absl::string_view> f = absl::StrSplit(line, ',');
  if (f.size() != 14) {
    return absl::InvalidArgumentError(
        absl::StrFormat("expected 14 fields, got %d", f.size()));
  }
  ResultRow r;
  r.protocol = std::string(f[0]);
  r.attack = std::string(f[1]);
  r.defense = std::string(f[2]);
  r.dataset = std::string(f[3]);
  if (!absl::SimpleAtoi(f[4], &r.n) || !absl::SimpleAtoi(f[5], &r.d) ||
      !absl::SimpleAtoi(f[6], &r.k) || !absl::SimpleAtod(f[7], &r.epsilon) ||
      !absl::SimpleAtod(f[8], &r.gamma) || !absl::SimpleAtoi(f[9], &r.seed) ||
      !absl::SimpleAtod(f[10], &r.acc) || !absl::SimpleAtod(f[11], &r.ncr) ||
      !absl::SimpleAtoi(f[12], &r.dropped_reports) ||
      !absl::SimpleAtoi(f[13], &r.runtime_ms)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("malformed row '%s'", line));
  }
  return r;
}

namespace {

// Random streams of one cell, keyed off the master seed.
enum Stream : uint64_t {
  kCorruption = 1,
  kAttack = 2,
  kDefense = 3,
  kProtocol = 4,
  kInjection = 5,
};

std::vector<ItemsetKey> GroundTruth(ProtocolKind protocol,
                                    const TransactionDb& db, uint32_t k) {
  std::vector<ItemsetKey> truth;
  if (MinesItemsets(protocol)) {
    for (auto& [key, count] : TopKItemsets(db, k)) truth.push_back(key);
    return truth;
  }
  for (uint32_t item : TopKItems(TrueItemFrequencies(db), k)) {
    truth.push_back(ItemsetKey::FromSortedUnchecked({item}));
  }
  return truth;
}

absl::StatusOr<ResultRow> RunCellImpl(const ExperimentConfig& cfg,
                                      const Cell& cell,
                                      const TransactionDb& db, uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  if (!(cell.gamma >= 0 && cell.gamma < 1)) {
    return absl::InvalidArgumentError("gamma outside [0, 1)");
  }
  const Rng master(seed);
  const uint32_t n0 = db.n();

  // Population the protocol sees, and which of its users are malicious.
  std::optional<TransactionDb> injected;
  std::vector<uint8_t> corrupted;
  uint32_t m = 0;
  if (cfg.inject) {
    m = static_cast<uint32_t>(cell.gamma / (1 - cell.gamma) * n0);
    if (m > 0) {
      Rng rng = master.Child(kInjection);
      std::vector<std::vector<uint32_t>> txs;
      txs.reserve(n0 + m);
      for (uint32_t u = 0; u < n0; ++u) {
        auto t = db.transaction(u);
        txs.emplace_back(t.begin(), t.end());
      }
      // Fake users carry a copy of a random genuine profile for honest rounds.
      for (uint32_t j = 0; j < m; ++j) {
        auto t = db.transaction(static_cast<uint32_t>(rng.UniformInt(n0)));
        txs.emplace_back(t.begin(), t.end());
      }
      LDPFIM_ASSIGN_OR_RETURN(injected, TransactionDb::Create(db.d(), txs));
      corrupted.assign(n0 + m, 0);
      std::fill(corrupted.begin() + n0, corrupted.end(), 1);
    }
  } else {
    m = static_cast<uint32_t>(cell.gamma * n0);
    if (m > 0) {
      Rng rng = master.Child(kCorruption);
      std::vector<uint32_t> users(n0);
      for (uint32_t u = 0; u < n0; ++u) users[u] = u;
      corrupted.assign(n0, 0);
      for (uint32_t j = 0; j < m; ++j) {
        const uint32_t pick = j + static_cast<uint32_t>(rng.UniformInt(n0 - j));
        std::swap(users[j], users[pick]);
        corrupted[users[j]] = 1;
      }
    }
  }
  const TransactionDb& population = injected ? *injected : db;

  MiningConfig base = cfg.mining;
  base.k = cell.k;
  base.epsilon = cell.epsilon;
  Rng defense_rng = master.Child(kDefense);
  LDPFIM_ASSIGN_OR_RETURN(MiningConfig mcfg,
                          ApplyDefense(cell.defense, base, defense_rng));

  std::unique_ptr<AdversaryHook> hook;
  if (m > 0 && cell.attack.kind != AttackKind::kNone) {
    AttackSpec spec{cell.attack.kind, cell.attack.threat, cfg.h,
                    master.Child(kAttack).seed()};
    LDPFIM_ASSIGN_OR_RETURN(
        hook, BuildAttack(spec, cell.protocol, population, corrupted));
  }

  LDPFIM_ASSIGN_OR_RETURN(
      MiningResult result,
      RunProtocol(cell.protocol, population, mcfg, corrupted, hook.get(),
                  master.Child(kProtocol)));

  RankedTruth truth(GroundTruth(cell.protocol, db, cell.k));
  std::vector<ItemsetKey> mined = result.topk;
  if (mined.size() > cell.k) mined.resize(cell.k);
  LDPFIM_ASSIGN_OR_RETURN(double acc, Acc(truth, mined));
  LDPFIM_ASSIGN_OR_RETURN(double ncr, Ncr(truth, mined));

  ResultRow row;
  row.protocol = std::string(ProtocolName(cell.protocol));
  row.attack = cell.attack.Label();
  row.defense = DefenseName(cell.defense);
  row.dataset = cfg.dataset.Name();
  row.n = population.n();
  row.d = population.d();
  row.k = cell.k;
  row.epsilon = cell.epsilon;
  row.gamma = cell.gamma;
  row.seed = seed;
  row.acc = acc;
  row.ncr = ncr;
  row.dropped_reports = result.dropped_reports;
  if (cfg.timing) {
    row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  }
  return row;
}

std::string CellContext(const Cell& c, uint64_t seed) {
  return absl::StrFormat("cell %s/%s/%s k=%d eps=%g gamma=%g seed=%d",
                         ProtocolName(c.protocol), c.attack.Label(),
                         DefenseName(c.defense), c.k, c.epsilon, c.gamma, seed);
}

}  // namespace

absl::StatusOr<ResultRow> RunCell(const ExperimentConfig& cfg,
                                  const Cell& cell, const TransactionDb& db,
                                  uint64_t seed) {
  absl::StatusOr<ResultRow> row = RunCellImpl(cfg, cell, db, seed);
  if (!row.ok()) {
    return absl::Status(row.status().code(),
                        absl::StrCat(CellContext(cell, seed), ": ",
                                     row.status().message()));
  }
  return row;
}

absl::StatusOr<ResultRow> RunCell(const ExperimentConfig& cfg, uint64_t seed) {
  LDPFIM_ASSIGN_OR_RETURN(TransactionDb db, cfg.dataset.Load());
  std::vector<Cell> cells = ExpandCells(cfg);
  return RunCell(cfg, cells.front(), db, seed);
}

unsigned WorkerCount() {
  if (const char* env = std::getenv("LDPFIM_WORKERS")) {
    unsigned v;
    if (absl::SimpleAtoi(env, &v) && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

absl::Status Sweep(const ExperimentConfig& cfg, std::ostream& out,
                   unsigned workers) {
  const std::vector<Cell> cells = ExpandCells(cfg);
  const uint64_t total = static_cast<uint64_t>(cells.size()) * cfg.seeds.size();
  if (total > cfg.max_cells) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "grid has %d runs, above the cap of %d", total, cfg.max_cells));
  }
  LDPFIM_ASSIGN_OR_RETURN(TransactionDb db, cfg.dataset.Load());

  out << CsvHeader() << '\n' << std::flush;
  std::vector<std::optional<absl::StatusOr<ResultRow>>> results(total);
  std::mutex mu;
  std::condition_variable ready;
  uint64_t next_job = 0;
  bool failed = false;

  auto work = [&] {
    for (;;) {
      uint64_t job;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failed || next_job >= total) return;
        job = next_job++;
      }
      const Cell& cell = cells[job / cfg.seeds.size()];
      absl::StatusOr<ResultRow> row =
          RunCell(cfg, cell, db, cfg.seeds[job % cfg.seeds.size()]);
      {
        std::lock_guard<std::mutex> lock(mu);
        if (!row.ok()) failed = true;
        results[job] = std::move(row);
      }
      ready.notify_all();
    }
  };

  std::vector<std::thread> pool;
  const unsigned n_threads =
      static_cast<unsigned>(std::min<uint64_t>(std::max(workers, 1u), total));
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(work);

  // Emit in grid order as soon as each prefix is complete.
  absl::Status status;
  for (uint64_t i = 0; i < total; ++i) {
    std::unique_lock<std::mutex> lock(mu);
    ready.wait(lock, [&] { return results[i].has_value() || (failed && next_job <= i); });
    if (!results[i].has_value()) break;
    absl::StatusOr<ResultRow> row = std::move(*results[i]);
    results[i].reset();
    lock.unlock();
    if (!row.ok()) {
      status = row.status();
      std::lock_guard<std::mutex> relock(mu);
      failed = true;
      break;
    }
    out << FormatRow(*row) << '\n' << std::flush;
  }
  for (std::thread& t : pool) t.join();
  if (status.ok() && failed) {
    for (auto& r : results) {
      if (r.has_value() && !r->ok()) return r->status();
    }
  }
  return status;
}

}  // namespace ldpfim
