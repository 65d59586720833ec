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

// thstar: experiment driver and scenario runner.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thstar/thstar.hpp"

namespace fs = std::filesystem;
using namespace thstar;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

int print_report(const VerificationReport& rep) {
  std::printf("verify: %zu searches, %zu ranges, %zu violations\n", rep.searches, rep.ranges,
              rep.violations.size());
  for (const ReportEntry& v : rep.violations) std::printf("%s %s\n", v.kind.c_str(), v.detail.c_str());
  return rep.ok() ? kPass : kFail;
}

int cmd_run(const std::string& config_path, const std::string& out,
            const std::map<std::string, std::string>& overrides, bool verify) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = ExperimentConfig::parse(read_file(config_path));
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  cfg.check();
  ExperimentResult res = run_experiment(cfg);
  if (!out.empty()) save_run(res, out);
  std::fputs(summary_text(res.summary).c_str(), stdout);
  for (const std::string& e : res.errors) std::printf("error %s\n", e.c_str());
  if (!verify) return res.errors.empty() ? kPass : kFail;
  const int rc = print_report(verify_against_oracle(*res.sim, res.oracle, cfg.seed));
  return res.errors.empty() ? rc : kFail;
}

int cmd_scenario_3_2() {
  ExperimentConfig cfg;
  cfg.bucket_capacity = 4;
  cfg.clients = 1;
  cfg.sequential = true;
  Simulator sim(cfg.sim_config());
  for (const char* k : {"abmf", "abnm", "acnm", "aczm", "acz"}) {
    sim.execute(1, Operation::insert(Key(k)));
  }
  if (sim.server_count() != 2) {
    std::printf("expected 2 servers, got %zu\n", sim.server_count());
    return kFail;
  }
  const ServerState& lo = sim.server(0).state();
  const ServerState& hi = sim.server(1).state();
  std::printf("split_string=%s lower=%zu upper=%zu\n", render(lo.interval.upper).c_str(),
              lo.bucket.keys.size(), hi.bucket.keys.size());
  for (const ServerState* s : {&lo, &hi}) {
    std::printf("server %u:", s->id);
    for (const Key& k : s->bucket.keys) std::printf(" %s", k.str().c_str());
    std::printf("\n");
  }
  const bool ok = render(lo.interval.upper) == "acn" && lo.bucket.keys.size() == 3 && hi.bucket.keys.size() == 2;
  return ok ? kPass : kFail;
}

int cmd_scenario_4_2(const std::string& out) {
  const ExperimentConfig cfg = ExperimentConfig::script();
  ExperimentResult res = run_experiment(cfg);
  if (!out.empty()) save_run(res, out);
  std::fputs(servers_csv(*res.sim).c_str(), stdout);
  const std::size_t servers = res.sim->server_count();
  std::printf("servers=%zu expected=9\n", servers);
  if (servers != 9) std::printf("deviation: the split rule produced %zu servers instead of 9\n", servers);
  std::printf("load_factor=%s\n", format_double(res.summary.final_load_factor).c_str());
  const int rc = print_report(verify_against_oracle(*res.sim, res.oracle, cfg.seed));
  return res.errors.empty() ? rc : kFail;
}

int cmd_dump(const std::string& dir) {
  const SavedRun run = load_run(dir);
  std::fputs(run.config.to_text().c_str(), stdout);
  std::uint64_t keys = 0;
  for (const ServerState& s : run.servers) {
    keys += s.bucket.keys.size();
    std::printf("server %u (%s, %s] keys=%zu trie=%s\n", s.id, render(s.interval.lower).c_str(),
                render(s.interval.upper).c_str(), s.bucket.keys.size(), serialize(s.local_trie).c_str());
    for (const Key& k : s.bucket.keys) std::printf("  %s\n", k.str().c_str());
  }
  std::printf("servers=%zu keys=%llu load_factor=%s\n", run.servers.size(),
              static_cast<unsigned long long>(keys),
              format_double(load_factor(keys, run.servers.size(), run.config.bucket_capacity)).c_str());
  return kPass;
}

int cmd_verify(const std::string& dir) {
  SavedRun run = load_run(dir);
  const OracleMap oracle = workload_oracle(run.config);
  Simulator sim(run.config.sim_config(), std::move(run.servers));
  return print_report(verify_against_oracle(sim, oracle, run.config.seed));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed trie hashing simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment and write CSVs");
  std::string config_path;
  std::string out;
  bool no_verify = false;
  std::map<std::string, std::string> overrides;
  run->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory");
  run->add_flag("--no-verify", no_verify, "skip the oracle report");
  for (const std::string& key : ExperimentConfig::keys()) {
    run->add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, "config override");
  }

  auto* s32 = app.add_subcommand("scenario-3-2", "Five-key split string example");
  auto* s42 = app.add_subcommand("scenario-4-2", "25-key four-client script");
  std::string s42_out;
  s42->add_option("--out", s42_out, "output directory");

  auto* dump = app.add_subcommand("dump", "Print the state of a saved run");
  std::string dump_dir;
  dump->add_option("--dir", dump_dir, "run directory")->required()->check(CLI::ExistingDirectory);

  auto* verify = app.add_subcommand("verify", "Check a saved run against its workload");
  std::string verify_dir;
  verify->add_option("--dir", verify_dir, "run directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(config_path, out, overrides, !no_verify);
    if (*s32) return cmd_scenario_3_2();
    if (*s42) return cmd_scenario_4_2(s42_out);
    if (*dump) return cmd_dump(dump_dir);
    if (*verify) return cmd_verify(verify_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFail;
  }
  return kUsage;
}
