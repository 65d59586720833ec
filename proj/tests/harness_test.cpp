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

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "thstar/harness.hpp"

using namespace thstar;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("thstar_harness_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Workload, ScriptIsTheFixedList) {
  const auto w = gen_workload(ExperimentConfig::script());
  ASSERT_EQ(w.size(), 25u);
  EXPECT_EQ(w.front().client, 1u);
  EXPECT_EQ(w.front().op.key.str(), "js");
  EXPECT_EQ(w[6].client, 4u);
  EXPECT_EQ(w[6].op.key.str(), "zur");
  EXPECT_EQ(w.back().client, 4u);
  EXPECT_EQ(w.back().op.key.str(), "h");
  for (const auto& item : w) EXPECT_EQ(item.op.kind, OpKind::insert);
}

TEST(Workload, SeededAndDistinct) {
  ExperimentConfig cfg;
  cfg.n_keys = 500;
  const auto a = gen_workload(cfg);
  const auto b = gen_workload(cfg);
  ASSERT_EQ(a.size(), b.size());
  std::set<Key> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].op.key, b[i].op.key);
    EXPECT_EQ(a[i].client, b[i].client);
    EXPECT_TRUE(seen.insert(a[i].op.key).second);
    EXPECT_GE(a[i].op.key.size(), cfg.key_len_min);
    EXPECT_LE(a[i].op.key.size(), cfg.key_len_max);
  }
  cfg.seed = 2;
  EXPECT_NE(gen_workload(cfg).front().op.key, a.front().op.key);
}

TEST(Workload, AscendingIsSorted) {
  ExperimentConfig cfg;
  cfg.distribution = Distribution::ascending;
  cfg.n_keys = 3;
  const auto w = gen_workload(cfg);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_LT(w[0].op.key, w[1].op.key);
  EXPECT_LT(w[1].op.key, w[2].op.key);
}

TEST(Workload, InsertThenSearch) {
  ExperimentConfig cfg;
  cfg.n_keys = 50;
  cfg.workload = WorkloadKind::insert_search;
  const auto w = gen_workload(cfg);
  ASSERT_EQ(w.size(), 100u);
  EXPECT_EQ(w[49].op.kind, OpKind::insert);
  EXPECT_EQ(w[50].op.kind, OpKind::search);
}

TEST(Config, ParseAndPrint) {
  const ExperimentConfig c = ExperimentConfig::parse(
      "# comment\n"
      "bucket_capacity = 50\n"
      "seed=7\n"
      "\n"
      "server_cap=100\n"
      "distribution=ascending\n"
      "workload=insert_search\n"
      "alphabet=abc\n"
      "sequential=true\n");
  EXPECT_EQ(c.bucket_capacity, 50u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.server_cap, 100u);
  EXPECT_EQ(c.distribution, Distribution::ascending);
  EXPECT_EQ(c.workload, WorkloadKind::insert_search);
  EXPECT_TRUE(c.sequential);
  EXPECT_EQ(c.key_space().alphabet.digits(), "abc");
  EXPECT_EQ(ExperimentConfig::parse(c.to_text()).to_text(), c.to_text());
}

TEST(Config, Rejections) {
  EXPECT_THROW(ExperimentConfig::parse("colour=blue"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("seed=x"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("seed"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("bucket_capacity=0"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("key_len_min=5\nkey_len_max=4"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("distribution=zipf"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("skip_probability=1"), ConfigError);
}

TEST(Experiment, ScriptSummary) {
  const ExperimentResult r = run_experiment(ExperimentConfig::script());
  EXPECT_EQ(r.summary.servers, 9u);
  EXPECT_EQ(r.summary.keys, 25u);
  EXPECT_EQ(r.summary.splits, 8u);
  EXPECT_NEAR(r.summary.final_load_factor, 25.0 / 36.0, 1e-12);
  EXPECT_EQ(r.oracle.size(), 25u);
}

TEST(Experiment, SamplesAndDoubling) {
  ExperimentConfig cfg;
  cfg.n_keys = 5000;
  cfg.bucket_capacity = 10;
  const ExperimentResult a = run_experiment(cfg);
  EXPECT_EQ(a.rows.size(), 100u);
  EXPECT_EQ(a.rows.back().keys, 5000u);
  for (const MetricsRow& row : a.rows) {
    EXPECT_GT(row.load_factor, 0.0);
    EXPECT_LE(row.load_factor, 1.0);
  }
  cfg.n_keys = 10000;
  const ExperimentResult b = run_experiment(cfg);
  const double ratio = static_cast<double>(b.summary.splits) / static_cast<double>(a.summary.splits);
  EXPECT_NEAR(ratio, 2.0, 0.2);
}

TEST(Experiment, VerifiesClean) {
  ExperimentConfig cfg;
  cfg.n_keys = 3000;
  cfg.bucket_capacity = 7;
  cfg.clients = 8;
  ExperimentResult r = run_experiment(cfg);
  const VerificationReport rep = verify_against_oracle(*r.sim, r.oracle, 1);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.searches, 3000u);
  EXPECT_EQ(rep.ranges, 100u);
}

TEST(Files, CsvShapes) {
  ExperimentConfig cfg = ExperimentConfig::script();
  cfg.op_log = true;
  const ExperimentResult r = run_experiment(cfg);
  const std::string stats = stats_csv(r.rows);
  EXPECT_EQ(stats.substr(0, stats.find('\n')), "tick,keys,servers,splits,messages,forwards,iams,loadfactor,msgs_per_op");
  const std::string ops = op_log_csv(r.op_log);
  EXPECT_EQ(ops.substr(0, ops.find('\n')), "clientId,opSeq,op,keys,serverFirstAddressed,hops,iamReceived");
  EXPECT_EQ(std::count(ops.begin(), ops.end(), '\n'), 26);
  const std::string servers = servers_csv(*r.sim);
  EXPECT_NE(servers.find("\"I("), std::string::npos);
}

TEST(Files, SaveLoadVerify) {
  ExperimentConfig cfg;
  cfg.n_keys = 2000;
  cfg.bucket_capacity = 6;
  const fs::path dir = scratch("save");
  const ExperimentResult r = run_experiment(cfg);
  save_run(r, dir);
  for (const char* f : {"config.txt", "stats.csv", "servers.csv", "buckets.csv", "summary.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  SavedRun back = load_run(dir);
  EXPECT_EQ(back.config.to_text(), cfg.to_text());
  ASSERT_EQ(back.servers.size(), r.sim->server_count());
  for (std::size_t i = 0; i < back.servers.size(); ++i) {
    const ServerState& want = r.sim->server(static_cast<ServerId>(i)).state();
    EXPECT_EQ(back.servers[i].bucket.keys, want.bucket.keys);
    EXPECT_EQ(back.servers[i].interval, want.interval);
    EXPECT_EQ(back.servers[i].local_trie, want.local_trie);
  }
  Simulator sim(back.config.sim_config(), std::move(back.servers));
  EXPECT_TRUE(verify_against_oracle(sim, workload_oracle(cfg), 1).ok());
  fs::remove_all(dir);
}

TEST(Files, CorruptDumpsAreRejected) {
  EXPECT_THROW(parse_state("h\n0,_,|,1,L(0)\n", "h\n", 4), ParseError);
  EXPECT_THROW(parse_state("h\n0,_,|,0,N\n", "h\n", 4), NilRejected);
  EXPECT_THROW(parse_state("h\n1,_,|,0,L(0)\n", "h\n", 4), ParseError);
  EXPECT_THROW(parse_state("h\n0,_,|,0,L(0)\n", "h\n3,a\n", 4), ParseError);
}

}  // namespace
