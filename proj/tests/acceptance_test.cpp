// Copyright 2026 The thstar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "properties.hpp"
#include "thstar/thstar.hpp"

using namespace thstar;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int number, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d %s: %s (%.2fs) %s\n", number, name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

Outcome split_example() {
  SimConfig cfg;
  cfg.bucket_capacity = 4;
  cfg.clients = 1;
  cfg.sequential = true;
  Simulator sim(cfg);
  for (const char* k : {"abmf", "abnm", "acnm", "aczm", "acz"}) sim.execute(1, Operation::insert(Key(k)));
  if (sim.server_count() != 2) return {false, "servers=" + std::to_string(sim.server_count())};
  const std::string c = render(sim.server(0).state().interval.upper);
  const std::size_t lo = sim.server(0).state().bucket.keys.size();
  const std::size_t hi = sim.server(1).state().bucket.keys.size();
  const std::string d = "split_string=" + c + " lower=" + std::to_string(lo) + " upper=" + std::to_string(hi);
  return {c == "acn" && lo == 3 && hi == 2, d};
}

Outcome script_scenario() {
  ExperimentResult r = run_experiment(ExperimentConfig::script());
  const std::size_t servers = r.sim->server_count();
  const VerificationReport rep = verify_against_oracle(*r.sim, r.oracle, 1);
  std::string d = "servers=" + std::to_string(servers) + " violations=" + std::to_string(rep.violations.size());
  if (servers != 9) d += " deviation: expected 9 servers";
  return {servers == 9 && rep.ok() && r.errors.empty(), d};
}

Outcome load_window() {
  bool in_window = true;
  std::vector<double> means;
  std::string d;
  for (std::size_t b : {50, 100, 500, 1000}) {
    ExperimentConfig cfg;
    cfg.n_keys = 200000;
    cfg.bucket_capacity = b;
    const ExperimentResult r = run_experiment(cfg);
    double lo = 1.0;
    double hi = 0.0;
    double sum = 0.0;
    std::size_t n = 0;
    std::size_t outside = 0;
    for (const MetricsRow& row : r.rows) {
      if (row.keys <= 10 * b) continue;
      lo = std::min(lo, row.load_factor);
      hi = std::max(hi, row.load_factor);
      sum += row.load_factor;
      ++n;
      if (row.load_factor < 0.60 || row.load_factor > 0.95) ++outside;
    }
    in_window &= outside == 0 && n > 0;
    means.push_back(sum / static_cast<double>(n));
    d += "b=" + std::to_string(b) + "[min " + fmt(lo) + " max " + fmt(hi) + " mean " + fmt(means.back()) +
         " outside " + std::to_string(outside) + "/" + std::to_string(n) + "] ";
  }
  const auto [mn, mx] = std::minmax_element(means.begin(), means.end());
  const double spread = *mx - *mn;
  d += "mean spread " + fmt(spread);
  return {in_window && spread < 0.10, d};
}

Outcome linear_splits() {
  ExperimentConfig cfg;
  cfg.bucket_capacity = 50;
  cfg.n_keys = 50000;
  const auto a = run_experiment(cfg).summary.splits;
  cfg.n_keys = 100000;
  const auto b = run_experiment(cfg).summary.splits;
  const double ratio = static_cast<double>(b) / static_cast<double>(a);
  return {std::abs(ratio - 2.0) <= 0.2,
          "splits(N)=" + std::to_string(a) + " splits(2N)=" + std::to_string(b) + " ratio=" + fmt(ratio)};
}

Outcome flat_cost() {
  ExperimentConfig cfg;
  cfg.bucket_capacity = 100;
  cfg.n_keys = 200000;
  const ExperimentSummary s = run_experiment(cfg).summary;
  return {s.msgs_last_decile <= 1.10 * s.msgs_second_decile,
          "second decile " + fmt(s.msgs_second_decile) + " last decile " + fmt(s.msgs_last_decile) +
              " msgs/insert"};
}

Outcome protocol() {
  std::size_t runs = 0;
  std::vector<std::string> bad;
  auto check = [&](const ExperimentConfig& cfg) {
    ++runs;
    for (const std::string& f : props::protocol_failures(cfg)) bad.push_back(f);
  };
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (std::size_t b : {4, 50, 100}) {
      ExperimentConfig cfg;
      cfg.seed = seed;
      cfg.bucket_capacity = b;
      cfg.clients = 2 + seed;
      cfg.n_keys = 20000;
      cfg.workload = seed % 2 ? WorkloadKind::insert : WorkloadKind::insert_search;
      check(cfg);
    }
  }
  ExperimentConfig asc;
  asc.distribution = Distribution::ascending;
  asc.n_keys = 20000;
  asc.bucket_capacity = 10;
  check(asc);
  check(ExperimentConfig::script());
  std::string d = std::to_string(runs) + " runs, " + std::to_string(bad.size()) + " failures";
  if (!bad.empty()) d += ": " + bad.front();
  return {bad.empty(), d};
}

Outcome determinism() {
  ExperimentConfig cfg;
  cfg.n_keys = 50000;
  cfg.bucket_capacity = 20;
  cfg.clients = 8;
  cfg.seed = 12345;
  cfg.op_log = true;
  const fs::path base = fs::temp_directory_path() / "thstar_acceptance_determinism";
  fs::remove_all(base);
  save_run(run_experiment(cfg), base / "a");
  save_run(run_experiment(cfg), base / "b");
  std::size_t same = 0;
  std::string d;
  for (const char* f : {"stats.csv", "servers.csv", "buckets.csv", "ops.csv", "summary.txt"}) {
    if (read_file(base / "a" / f) == read_file(base / "b" / f)) {
      ++same;
    } else {
      d += std::string(f) + " differs ";
    }
  }
  fs::remove_all(base);
  return {same == 5, std::to_string(same) + "/5 files byte-identical " + d};
}

Outcome small_space() {
  const auto bad = props::small_space_failures(2026, 1000);
  return {bad.empty(), "1000 sequences, " + std::to_string(bad.size()) + " failures" +
                           (bad.empty() ? std::string() : ": " + bad.front())};
}

}  // namespace

int main() {
  criterion(1, "split-string example", 1.0, split_example);
  criterion(2, "25-key script", 1.0, script_scenario);
  criterion(3, "load factor window", 120.0, load_window);
  criterion(4, "linear splits", 60.0, linear_splits);
  criterion(5, "flat message cost", 120.0, flat_cost);
  criterion(6, "protocol properties", 120.0, protocol);
  criterion(7, "determinism", 60.0, determinism);
  criterion(8, "small-space routing", 120.0, small_space);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
