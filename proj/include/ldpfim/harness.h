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

#ifndef LDPFIM_HARNESS_H_
#define LDPFIM_HARNESS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "ldpfim/attack.h"
#include "ldpfim/dataset.h"
#include "ldpfim/defense.h"
#include "ldpfim/mining.h"

namespace ldpfim {

// Either a transaction file or generator parameters.
struct DatasetSpec {
  std::string path;
  std::optional<uint32_t> path_d;  // Domain size override for files.
  SyntheticParams synthetic;

  std::string Name() const;
  absl::StatusOr<TransactionDb> Load() const;
};

// One attack column value, e.g. "AOA" or "AOA@PK-0.1".
struct AttackChoice {
  AttackKind kind = AttackKind::kNone;
  ThreatModel threat;

  std::string Label() const;
};
absl::StatusOr<AttackChoice> ParseAttackChoice(absl::string_view text);

// A grid of cells. Scalar knobs apply to every cell; list knobs are crossed.
//
// Config file keys (one `key = value` per line, `#` starts a comment, lists
// are comma separated):
//   dataset            transaction file, one space-separated line per user
//   dataset_d          domain size for the file (default: max item + 1)
//   synthetic.n / .d / .zipf / .mean_len / .max_len / .seed
//   protocol           LDPMINER, SVIM, SVSM, FIML_I, FIML_IS, PRIVSET_TOPK
//   attack             NONE, AOA, RRA, RSA, MGA_R, MGA_ADV, optionally @FK,
//                      @PK-<fraction> or @MITM-<fraction>
//   defense            NONE, FILTER_FO[:theta], RAND_K[:kmax], REPLACE_FO,
//                      CRYPTO_FO
//   k, epsilon, gamma  lists
//   seeds              list; `a..b` expands to an inclusive range
//   h                  seed-search width of hashing attacks (1000)
//   inject             true: add m fake users instead of corrupting m
//   timing             false: write runtime_ms as 0 for byte-stable output
//   max_cells          refuse larger grids (100000)
//   percentile, padding_l, budget_split, fiml_split   protocol knobs
struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<ProtocolKind> protocols = {ProtocolKind::kSvim};
  std::vector<AttackChoice> attacks = {AttackChoice{}};
  std::vector<Defense> defenses = {Defense{}};
  std::vector<uint32_t> ks = {16};
  std::vector<double> epsilons = {4.0};
  std::vector<double> gammas = {0.0};
  std::vector<uint64_t> seeds = {1};
  uint32_t h = 1000;
  bool inject = false;
  bool timing = true;
  uint64_t max_cells = 100000;
  MiningConfig mining;  // k and epsilon are taken from the grid.
};

absl::Status SetConfigValue(ExperimentConfig& cfg, absl::string_view key,
                            absl::string_view value);
absl::StatusOr<ExperimentConfig> ParseConfig(absl::string_view text);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);

struct Cell {
  ProtocolKind protocol = ProtocolKind::kSvim;
  AttackChoice attack;
  Defense defense;
  uint32_t k = 16;
  double epsilon = 4.0;
  double gamma = 0.0;
};

// Cross product in lexicographic order: protocol, attack, defense, k,
// epsilon, gamma.
std::vector<Cell> ExpandCells(const ExperimentConfig& cfg);

struct ResultRow {
  std::string protocol;
  std::string attack;
  std::string defense;
  std::string dataset;
  uint32_t n = 0;
  uint32_t d = 0;
  uint32_t k = 0;
  double epsilon = 0;
  double gamma = 0;
  uint64_t seed = 0;
  double acc = 0;
  double ncr = 0;
  uint32_t dropped_reports = 0;
  int64_t runtime_ms = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

std::string CsvHeader();
std::string FormatRow(const ResultRow& row);
absl::StatusOr<ResultRow> ParseRow(absl::string_view line);

// gamma is the share of malicious users among all n_total users, so
// m = floor(gamma * n_total) under corruption and
// floor(gamma / (1 - gamma) * n) under injection.
absl::StatusOr<ResultRow> RunCell(const ExperimentConfig& cfg,
                                  const Cell& cell, const TransactionDb& db,
                                  uint64_t seed);
// The first value of every list, loading the dataset.
absl::StatusOr<ResultRow> RunCell(const ExperimentConfig& cfg, uint64_t seed);

// LDPFIM_WORKERS when set to a positive integer, else hardware concurrency.
unsigned WorkerCount();

// Writes the header, then one line per cell and seed in grid order. Lines are
// flushed whole. Stops at the first failing cell and returns its error.
absl::Status Sweep(const ExperimentConfig& cfg, std::ostream& out,
                   unsigned workers);

}  // namespace ldpfim

#endif  // LDPFIM_HARNESS_H_
