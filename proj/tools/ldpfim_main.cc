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

// Command-line front end: dataset generation, statistics, single runs,
// sweeps and filter false-positive tables.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "ldpfim/dataset.h"
#include "ldpfim/defense.h"
#include "ldpfim/frequency_oracle.h"
#include "ldpfim/harness.h"

namespace {

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return 1;
}

absl::StatusOr<ldpfim::ExperimentConfig> BuildConfig(
    const std::string& path, const std::vector<std::string>& overrides) {
  ldpfim::ExperimentConfig cfg;
  if (!path.empty()) {
    absl::StatusOr<ldpfim::ExperimentConfig> loaded = ldpfim::LoadConfig(path);
    if (!loaded.ok()) return loaded.status();
    cfg = *std::move(loaded);
  }
  for (const std::string& kv : overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      return absl::InvalidArgumentError(
          absl::StrFormat("--set expects key=value, got '%s'", kv));
    }
    absl::Status st =
        ldpfim::SetConfigValue(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    if (!st.ok()) return st;
  }
  return cfg;
}

void AddSyntheticFlags(CLI::App* app, ldpfim::SyntheticParams& p) {
  app->add_option("--n", p.n, "Number of users");
  app->add_option("--d", p.d, "Item domain size");
  app->add_option("--zipf", p.zipf_exponent, "Zipf exponent of item popularity");
  app->add_option("--mean-len", p.mean_len, "Mean transaction length");
  app->add_option("--max-len", p.max_len, "Length cap (0: none)");
  app->add_option("--seed", p.seed, "Generator seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LDP frequent itemset mining poisoning lab"};
  app.require_subcommand(1);

  ldpfim::SyntheticParams gen_params;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Write a synthetic dataset");
  AddSyntheticFlags(gen, gen_params);
  gen->add_option("--out,-o", gen_out, "Output file (default: stdout)");

  ldpfim::SyntheticParams stats_params;
  std::string stats_path;
  uint32_t stats_top = 20;
  uint32_t stats_itemsets = 0;
  CLI::App* stats = app.add_subcommand("stats", "Print true frequencies");
  AddSyntheticFlags(stats, stats_params);
  stats->add_option("--dataset", stats_path, "Transaction file");
  stats->add_option("--top", stats_top, "Items to list");
  stats->add_option("--itemsets", stats_itemsets, "Top itemsets to list");

  std::string config_path;
  std::vector<std::string> overrides;
  uint64_t run_seed = 1;
  CLI::App* run = app.add_subcommand("run", "Run one cell and print its row");
  run->add_option("--config,-c", config_path, "Config file");
  run->add_option("--set", overrides, "key=value override");
  run->add_option("--seed", run_seed, "Master seed");

  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run the full grid; worker count from LDPFIM_WORKERS");
  sweep->add_option("--config,-c", config_path, "Config file");
  sweep->add_option("--set", overrides, "key=value override");
  sweep->add_option("--out,-o", sweep_out, "CSV file (default: stdout)");

  std::string fpr_fo = "OLH";
  uint32_t fpr_d = 256;
  std::vector<double> fpr_eps = {0.5, 1, 2, 3, 4};
  std::vector<double> fpr_theta;
  CLI::App* fpr = app.add_subcommand("fpr", "Tabulate filter false positives");
  fpr->add_option("--fo", fpr_fo, "OLH, SH or RAPPOR");
  fpr->add_option("--d", fpr_d, "Oracle domain size");
  fpr->add_option("--epsilon", fpr_eps, "Privacy budgets")->delimiter(',');
  fpr->add_option("--theta", fpr_theta, "Thresholds (default: per oracle)")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    absl::StatusOr<ldpfim::TransactionDb> db =
        ldpfim::GenerateSynthetic(gen_params);
    if (!db.ok()) return Fail(db.status());
    if (gen_out.empty()) {
      ldpfim::WriteDb(*db, std::cout);
    } else {
      std::ofstream out(gen_out);
      if (!out) return Fail(absl::NotFoundError("cannot write " + gen_out));
      ldpfim::WriteDb(*db, out);
    }
    return 0;
  }

  if (stats->parsed()) {
    absl::StatusOr<ldpfim::TransactionDb> db =
        stats_path.empty() ? ldpfim::GenerateSynthetic(stats_params)
                           : ldpfim::LoadDb(stats_path, std::nullopt);
    if (!db.ok()) return Fail(db.status());
    std::cout << absl::StrFormat("n=%d d=%d items=%d p50_len=%d p90_len=%d\n",
                                 db->n(), db->d(), db->total_items(),
                                 ldpfim::LengthPercentile(*db, 0.5),
                                 ldpfim::LengthPercentile(*db, 0.9));
    const std::vector<double> freqs = ldpfim::TrueItemFrequencies(*db);
    std::cout << "rank,item,frequency\n";
    const auto top = ldpfim::TopKItems(freqs, std::min(stats_top, db->d()));
    for (size_t r = 0; r < top.size(); ++r) {
      std::cout << absl::StrFormat("%d,%d,%.6f\n", r + 1, top[r], freqs[top[r]]);
    }
    if (stats_itemsets > 0) {
      std::cout << "rank,itemset,frequency\n";
      const auto sets = ldpfim::TopKItemsets(*db, stats_itemsets);
      for (size_t r = 0; r < sets.size(); ++r) {
        std::cout << absl::StrFormat("%d,%s,%.6f\n", r + 1,
                                     sets[r].first.ToString(),
                                     sets[r].second);
      }
    }
    return 0;
  }

  if (run->parsed() || sweep->parsed()) {
    absl::StatusOr<ldpfim::ExperimentConfig> cfg =
        BuildConfig(config_path, overrides);
    if (!cfg.ok()) return Fail(cfg.status());
    if (run->parsed()) {
      absl::StatusOr<ldpfim::ResultRow> row = ldpfim::RunCell(*cfg, run_seed);
      if (!row.ok()) return Fail(row.status());
      std::cout << ldpfim::CsvHeader() << "\n" << ldpfim::FormatRow(*row) << "\n";
      return 0;
    }
    absl::Status st;
    if (sweep_out.empty()) {
      st = ldpfim::Sweep(*cfg, std::cout, ldpfim::WorkerCount());
    } else {
      std::ofstream out(sweep_out);
      if (!out) return Fail(absl::NotFoundError("cannot write " + sweep_out));
      st = ldpfim::Sweep(*cfg, out, ldpfim::WorkerCount());
    }
    return st.ok() ? 0 : Fail(st);
  }

  if (fpr->parsed()) {
    absl::StatusOr<ldpfim::FOKind> kind = ldpfim::ParseFOKind(fpr_fo);
    if (!kind.ok()) return Fail(kind.status());
    std::cout << "fo,d,epsilon,theta,fpr\n";
    for (double eps : fpr_eps) {
      absl::StatusOr<ldpfim::FOConfig> fo =
          ldpfim::MakeConfig(*kind, eps, fpr_d);
      if (!fo.ok()) return Fail(fo.status());
      std::vector<double> thetas = fpr_theta;
      if (thetas.empty()) thetas.push_back(ldpfim::DefaultFilterTheta(*fo));
      for (double theta : thetas) {
        std::cout << absl::StrFormat("%s,%d,%g,%g,%.6g\n", fpr_fo, fpr_d, eps,
                                     theta,
                                     ldpfim::Fpr(*kind, theta, fpr_d, *fo));
      }
    }
    return 0;
  }
  return 0;
}
