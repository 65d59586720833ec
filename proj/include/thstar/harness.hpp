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

#ifndef THSTAR_HARNESS_HPP
#define THSTAR_HARNESS_HPP

// Workload generation, experiment driver, oracle verification and the file
// formats of a saved run.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "thstar/client.hpp"
#include "thstar/csv.hpp"
#include "thstar/errors.hpp"
#include "thstar/key_space.hpp"
#include "thstar/net_sim.hpp"
#include "thstar/server_node.hpp"
#include "thstar/trie.hpp"

namespace thstar {

enum class Distribution { random, ascending, script };
enum class WorkloadKind { insert, insert_search };

class ConfigError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

struct ExperimentConfig {
  std::size_t bucket_capacity = 4;
  std::size_t clients = 4;
  std::uint64_t seed = 1;
  std::optional<std::size_t> server_cap;
  WorkloadKind workload = WorkloadKind::insert;
  std::size_t n_keys = 1000;
  std::size_t key_len_min = 4;
  std::size_t key_len_max = 12;
  Distribution distribution = Distribution::random;
  std::string alphabet;  // empty: printable ASCII
  std::size_t max_key_len = 32;
  double skip_probability = 0.25;
  bool sequential = false;
  std::size_t samples = 100;
  bool check_invariants = false;
  bool op_log = false;

  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k{
        "bucket_capacity", "clients",      "seed",        "server_cap",       "workload",
        "n_keys",          "key_len_min",  "key_len_max", "distribution",     "alphabet",
        "max_key_len",     "skip_probability", "sequential", "samples", "check_invariants",
        "op_log"};
    return k;
  }

  /// The fixed 25-insertion, 4-client, b=4 example file.
  static ExperimentConfig script() {
    ExperimentConfig c;
    c.distribution = Distribution::script;
    c.bucket_capacity = 4;
    c.clients = 4;
    c.n_keys = 25;
    c.sequential = true;
    return c;
  }

  void set(std::string_view key, std::string_view value) {
    auto num = [&](auto& out) {
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("config: bad number for " + std::string(key) + ": '" + std::string(value) + "'");
      }
    };
    auto boolean = [&]() {
      if (value == "true" || value == "1") return true;
      if (value == "false" || value == "0") return false;
      throw ConfigError("config: bad boolean for " + std::string(key));
    };
    if (key == "bucket_capacity") {
      num(bucket_capacity);
    } else if (key == "clients") {
      num(clients);
    } else if (key == "seed") {
      num(seed);
    } else if (key == "server_cap") {
      if (value == "none" || value.empty()) {
        server_cap.reset();
      } else {
        std::size_t v = 0;
        num(v);
        server_cap = v;
      }
    } else if (key == "workload") {
      if (value == "insert") {
        workload = WorkloadKind::insert;
      } else if (value == "insert_search") {
        workload = WorkloadKind::insert_search;
      } else {
        throw ConfigError("config: workload must be insert or insert_search");
      }
    } else if (key == "n_keys") {
      num(n_keys);
    } else if (key == "key_len_min") {
      num(key_len_min);
    } else if (key == "key_len_max") {
      num(key_len_max);
    } else if (key == "distribution") {
      if (value == "random") {
        distribution = Distribution::random;
      } else if (value == "ascending") {
        distribution = Distribution::ascending;
      } else if (value == "script") {
        distribution = Distribution::script;
      } else {
        throw ConfigError("config: distribution must be random, ascending or script");
      }
    } else if (key == "alphabet") {
      alphabet = std::string(value);
    } else if (key == "max_key_len") {
      num(max_key_len);
    } else if (key == "skip_probability") {
      num(skip_probability);
    } else if (key == "sequential") {
      sequential = boolean();
    } else if (key == "samples") {
      num(samples);
    } else if (key == "check_invariants") {
      check_invariants = boolean();
    } else if (key == "op_log") {
      op_log = boolean();
    } else {
      throw ConfigError("config: unknown key '" + std::string(key) + "'");
    }
  }

  /// key=value lines; blank lines and '#' comments are skipped.
  static ExperimentConfig parse(std::string_view text) {
    ExperimentConfig c;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + line + "'");
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    c.check();
    return c;
  }

  void check() const {
    if (bucket_capacity == 0) throw ConfigError("config: bucket_capacity must be positive");
    if (clients == 0) throw ConfigError("config: clients must be positive");
    if (n_keys == 0) throw ConfigError("config: n_keys must be positive");
    if (key_len_min == 0 || key_len_min > key_len_max || key_len_max > max_key_len) {
      throw ConfigError("config: need 1 <= key_len_min <= key_len_max <= max_key_len");
    }
    if (skip_probability < 0.0 || skip_probability >= 1.0) {
      throw ConfigError("config: skip_probability must lie in [0, 1)");
    }
    if (samples == 0) throw ConfigError("config: samples must be positive");
    if (distribution == Distribution::script && clients < 4) {
      throw ConfigError("config: the script workload needs 4 clients");
    }
  }

  std::string to_text() const {
    std::string out;
    auto line = [&out](std::string_view k, const std::string& v) {
      out += k;
      out += '=';
      out += v;
      out += '\n';
    };
    const char* dist = distribution == Distribution::random      ? "random"
                       : distribution == Distribution::ascending ? "ascending"
                                                                 : "script";
    char prob[32];
    std::snprintf(prob, sizeof prob, "%.6g", skip_probability);
    line("bucket_capacity", std::to_string(bucket_capacity));
    line("clients", std::to_string(clients));
    line("seed", std::to_string(seed));
    line("server_cap", server_cap ? std::to_string(*server_cap) : "none");
    line("workload", workload == WorkloadKind::insert ? "insert" : "insert_search");
    line("n_keys", std::to_string(n_keys));
    line("key_len_min", std::to_string(key_len_min));
    line("key_len_max", std::to_string(key_len_max));
    line("distribution", dist);
    if (!alphabet.empty()) line("alphabet", alphabet);
    line("max_key_len", std::to_string(max_key_len));
    line("skip_probability", prob);
    line("sequential", sequential ? "true" : "false");
    line("samples", std::to_string(samples));
    line("check_invariants", check_invariants ? "true" : "false");
    line("op_log", op_log ? "true" : "false");
    return out;
  }

  KeySpace key_space() const {
    KeySpace ks;
    if (!alphabet.empty()) ks.alphabet = Alphabet(alphabet);
    ks.max_key_length = max_key_len;
    return ks;
  }

  SimConfig sim_config() const {
    SimConfig s;
    s.key_space = key_space();
    s.bucket_capacity = bucket_capacity;
    s.clients = clients;
    s.seed = seed;
    s.server_cap = server_cap;
    s.skip_probability = skip_probability;
    s.sequential = sequential;
    s.check_invariants = check_invariants;
    return s;
  }
};

struct WorkloadItem {
  ClientId client = 1;
  Operation op;
};

/// The example insertion list as (client, key) pairs, clients numbered 1..4.
inline const std::vector<std::pair<ClientId, std::string>>& script_pairs() {
  static const std::vector<std::pair<ClientId, std::string>> pairs{
      {1, "js"},    {1, "hw"},    {3, "c"},     {2, "gwmr"},  {3, "g"},     {2, "km"},
      {4, "zur"},   {1, "ewg"},   {3, "lewhv"}, {2, "nrq"},   {3, "mf"},    {4, "pem"},
      {4, "rl"},    {2, "bqyg"},  {3, "v"},     {1, "j"},     {2, "qcm"},   {4, "czxav"},
      {2, "lhgd"},  {3, "z"},     {1, "lrz"},   {3, "kiyfg"}, {4, "pbtpr"}, {3, "hpqtp"},
      {4, "h"}};
  return pairs;
}

/// Distinct uniformly random keys in generation order.
inline std::vector<Key> random_keys(const KeySpace& space, std::size_t n, std::size_t len_min,
                                    std::size_t len_max, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(len_min, len_max);
  std::uniform_int_distribution<std::size_t> digit(0, space.alphabet.size() - 1);
  std::unordered_set<std::string> seen;
  std::vector<Key> out;
  out.reserve(n);
  std::size_t attempts = 0;
  const std::size_t limit = 100 * n + 1000;
  while (out.size() < n) {
    if (++attempts > limit) throw ConfigError("key space too small for the requested n_keys");
    std::string k(len(rng), ' ');
    for (char& c : k) c = space.alphabet.digits()[digit(rng)];
    if (seen.insert(k).second) out.emplace_back(std::move(k));
  }
  return out;
}

inline std::vector<WorkloadItem> gen_workload(const ExperimentConfig& cfg) {
  cfg.check();
  const KeySpace space = cfg.key_space();
  std::vector<WorkloadItem> out;
  if (cfg.distribution == Distribution::script) {
    for (const auto& [client, key] : script_pairs()) {
      out.push_back({client, Operation::insert(space.make_key(key))});
    }
    return out;
  }
  std::mt19937_64 rng(cfg.seed);
  std::vector<Key> keys = random_keys(space, cfg.n_keys, cfg.key_len_min, cfg.key_len_max, rng);
  if (cfg.distribution == Distribution::ascending) std::sort(keys.begin(), keys.end());
  std::uniform_int_distribution<ClientId> client(1, static_cast<ClientId>(cfg.clients));
  out.reserve(keys.size() * (cfg.workload == WorkloadKind::insert_search ? 2 : 1));
  for (const Key& k : keys) out.push_back({client(rng), Operation::insert(k)});
  if (cfg.workload == WorkloadKind::insert_search) {
    std::vector<Key> probes = keys;
    std::shuffle(probes.begin(), probes.end(), rng);
    for (Key& k : probes) out.push_back({client(rng), Operation::search(std::move(k))});
  }
  return out;
}

using OracleMap = std::set<Key>;

struct MetricsRow {
  std::uint64_t tick = 0;
  std::uint64_t keys = 0;
  std::size_t servers = 0;
  std::uint64_t splits = 0;
  std::uint64_t messages = 0;
  std::uint64_t forwards = 0;
  std::uint64_t iams = 0;
  double load_factor = 0.0;
  double msgs_per_op = 0.0;  // over the ops completed since the previous row
};

struct ExperimentSummary {
  std::uint64_t inserts = 0;
  std::uint64_t keys = 0;
  std::size_t servers = 0;
  std::uint64_t splits = 0;
  double final_load_factor = 0.0;
  // Mean messages per insert over insert-index windows [0, 0.1N),
  // [0.1N, 0.2N) and [0.9N, N).
  double msgs_first_decile = 0.0;
  double msgs_second_decile = 0.0;
  double msgs_last_decile = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<MetricsRow> rows;
  ExperimentSummary summary;
  OracleMap oracle;
  std::vector<std::uint32_t> insert_messages;  // per insert, in completion order
  std::vector<OpResult> op_log;                // filled when config.op_log
  std::vector<std::string> errors;
  std::unique_ptr<Simulator> sim;
};

inline double mean_over(const std::vector<std::uint32_t>& v, double from, double to) {
  const auto n = static_cast<double>(v.size());
  const auto b = static_cast<std::size_t>(from * n);
  const auto e = std::max(b + 1, static_cast<std::size_t>(to * n));
  if (v.empty() || b >= v.size()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = b; i < std::min(e, v.size()); ++i) sum += v[i];
  return sum / static_cast<double>(std::min(e, v.size()) - b);
}

inline double load_factor(std::uint64_t keys, std::size_t servers, std::size_t capacity) {
  return static_cast<double>(keys) / (static_cast<double>(servers) * static_cast<double>(capacity));
}

/// Drives the simulator through the configured workload, sampling a
/// MetricsRow every n_keys / samples inserts.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.check();
  ExperimentResult res;
  res.config = cfg;
  res.sim = std::make_unique<Simulator>(cfg.sim_config());
  Simulator& sim = *res.sim;
  const std::vector<WorkloadItem> work = gen_workload(cfg);
  const std::size_t inserts = static_cast<std::size_t>(
      std::count_if(work.begin(), work.end(), [](const WorkloadItem& w) { return w.op.kind == OpKind::insert; }));
  const std::size_t every = std::max<std::size_t>(1, inserts / cfg.samples);
  res.insert_messages.reserve(inserts);

  std::uint64_t done_inserts = 0;
  std::uint64_t window_ops = 0;
  std::uint64_t window_start_messages = 0;
  sim.on_complete([&](const OpResult& r) {
    ++window_ops;
    if (cfg.op_log) res.op_log.push_back(r);
    if (r.status == Status::error) res.errors.push_back(r.key.str() + ": " + r.error);
    if (r.kind != OpKind::insert) return;
    ++done_inserts;
    res.insert_messages.push_back(r.messages);
    if (r.status == Status::ok || r.status == Status::duplicate) res.oracle.insert(r.key);
    if (done_inserts % every == 0) {
      const SimStats& s = sim.stats();
      MetricsRow row;
      row.tick = sim.tick();
      row.keys = sim.stored_keys();
      row.servers = sim.server_count();
      row.splits = s.splits;
      row.messages = s.messages_total;
      row.forwards = s.forwards;
      row.iams = s.iams;
      row.load_factor = load_factor(row.keys, row.servers, cfg.bucket_capacity);
      row.msgs_per_op = static_cast<double>(s.messages_total - window_start_messages) /
                        static_cast<double>(window_ops);
      window_ops = 0;
      window_start_messages = s.messages_total;
      res.rows.push_back(row);
    }
  });
  for (const WorkloadItem& w : work) sim.submit(w.client, w.op);
  sim.run_until_quiescent();
  sim.on_complete(nullptr);

  ExperimentSummary& s = res.summary;
  s.inserts = done_inserts;
  s.keys = sim.stored_keys();
  s.servers = sim.server_count();
  s.splits = sim.stats().splits;
  s.final_load_factor = load_factor(s.keys, s.servers, cfg.bucket_capacity);
  s.msgs_first_decile = mean_over(res.insert_messages, 0.0, 0.1);
  s.msgs_second_decile = mean_over(res.insert_messages, 0.1, 0.2);
  s.msgs_last_decile = mean_over(res.insert_messages, 0.9, 1.0);
  return res;
}

struct ReportEntry {
  std::string kind;
  std::string detail;
};

struct VerificationReport {
  std::vector<ReportEntry> violations;
  std::size_t searches = 0;
  std::size_t ranges = 0;

  bool ok() const noexcept { return violations.empty(); }
};

/// Checks a quiescent file against the oracle: bucket union, per-server
/// placement, interval cover, trie validity, lookups of every key by a fresh
/// client, and `range_queries` random range scans.
inline VerificationReport verify_against_oracle(Simulator& sim, const OracleMap& oracle,
                                                std::uint64_t seed, std::size_t range_queries = 100) {
  VerificationReport rep;
  auto flag = [&rep](std::string kind, std::string detail) {
    if (rep.violations.size() < 1000) rep.violations.push_back({std::move(kind), std::move(detail)});
  };
  const std::size_t max_pos = sim.config().key_space.max_key_length;

  std::vector<Key> stored;
  std::vector<const Interval*> ivs;
  for (const ServerNode& node : sim.servers()) {
    const ServerState& s = node.state();
    ivs.push_back(&s.interval);
    if (s.bucket.keys.size() > s.bucket.capacity) {
      flag("BUCKET-CAPACITY", "server " + std::to_string(s.id) + " holds " +
                                  std::to_string(s.bucket.keys.size()) + " keys");
    }
    for (const Key& k : s.bucket.keys) {
      if (!s.interval.contains(k)) {
        flag("KEY-PLACEMENT", "key '" + k.str() + "' outside server " + std::to_string(s.id));
      }
      stored.push_back(k);
    }
    for (const Violation& v : validate(s.local_trie, max_pos)) {
      flag("TRIE-VALID", "server " + std::to_string(s.id) + ": " + v.detail);
    }
  }
  for (std::size_t c = 1; c <= sim.client_count(); ++c) {
    for (const Violation& v : validate(sim.client(static_cast<ClientId>(c)).image(), max_pos)) {
      flag("TRIE-VALID", "client " + std::to_string(c) + ": " + v.detail);
    }
  }
  std::sort(stored.begin(), stored.end());
  if (std::adjacent_find(stored.begin(), stored.end()) != stored.end()) {
    flag("KEY-PLACEMENT", "a key is stored twice");
  }
  if (!std::equal(stored.begin(), stored.end(), oracle.begin(), oracle.end())) {
    std::vector<Key> missing;
    std::set_difference(oracle.begin(), oracle.end(), stored.begin(), stored.end(),
                        std::back_inserter(missing));
    flag("KEY-PLACEMENT", "bucket union differs from oracle (" + std::to_string(stored.size()) +
                              " stored, " + std::to_string(oracle.size()) + " expected, " +
                              std::to_string(missing.size()) + " missing)");
  }

  std::sort(ivs.begin(), ivs.end(),
            [](const Interval* a, const Interval* b) { return bound_less(a->lower, b->lower); });
  if (!ivs.front()->lower.is_bottom()) flag("DISJOINT-COVER", "lowest interval above BOTTOM");
  for (std::size_t i = 0; i + 1 < ivs.size(); ++i) {
    if (ivs[i]->upper != ivs[i + 1]->lower) {
      flag("DISJOINT-COVER", "intervals break at " + render(ivs[i]->upper) + " / " +
                                 render(ivs[i + 1]->lower));
    }
  }
  if (!ivs.back()->upper.is_top()) flag("DISJOINT-COVER", "highest interval below TOP");

  const ClientId fresh = sim.add_client();
  for (const Key& k : oracle) {
    const OpResult r = sim.execute(fresh, Operation::search(k));
    ++rep.searches;
    if (r.status != Status::ok) flag("SEARCHABLE", "key '" + k.str() + "' -> " + to_string(r.status));
  }

  std::mt19937_64 rng(seed);
  const KeySpace& space = sim.config().key_space;
  const std::vector<Key> pool(oracle.begin(), oracle.end());
  std::uniform_int_distribution<std::size_t> coin(0, 3);
  for (std::size_t q = 0; q < range_queries; ++q) {
    auto pick = [&]() {
      if (pool.empty() || coin(rng) == 0) {
        return random_keys(space, 1, 1, std::min<std::size_t>(space.max_key_length, 6), rng).front();
      }
      std::uniform_int_distribution<std::size_t> i(0, pool.size() - 1);
      return pool[i(rng)];
    };
    Key a = pick();
    Key b = pick();
    if (b < a) std::swap(a, b);
    const OpResult r = sim.execute(fresh, Operation::range(a, b));
    ++rep.ranges;
    const std::vector<Key> expect(oracle.lower_bound(a), oracle.upper_bound(b));
    if (r.status != Status::ok || r.keys != expect) {
      flag("RANGE-EXACTNESS", "range [" + a.str() + ", " + b.str() + "] returned " +
                                  std::to_string(r.keys.size()) + " keys, expected " +
                                  std::to_string(expect.size()));
    }
  }
  return rep;
}

// ---- file formats -------------------------------------------------------

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string stats_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "tick,keys,servers,splits,messages,forwards,iams,loadfactor,msgs_per_op\n";
  for (const MetricsRow& r : rows) {
    out += csv::row(std::to_string(r.tick), std::to_string(r.keys), std::to_string(r.servers),
                    std::to_string(r.splits), std::to_string(r.messages), std::to_string(r.forwards),
                    std::to_string(r.iams), format_double(r.load_factor), format_double(r.msgs_per_op));
  }
  return out;
}

inline std::string op_log_csv(const std::vector<OpResult>& ops) {
  std::string out = "clientId,opSeq,op,keys,serverFirstAddressed,hops,iamReceived\n";
  for (const OpResult& r : ops) {
    const std::string keys = r.kind == OpKind::range ? r.key.str() + " " + r.key_max.str() : r.key.str();
    out += csv::row(std::to_string(r.client), std::to_string(r.op_seq), std::string(to_string(r.kind)),
                    keys, std::to_string(r.first_server), std::to_string(r.hops),
                    std::string(r.iam_received ? "1" : "0"));
  }
  return out;
}

/// One row per server: id, lower, upper, keycount, trie.
inline std::string servers_csv(const Simulator& sim) {
  std::string out = "id,lower,upper,keycount,trie\n";
  for (const ServerNode& n : sim.servers()) {
    const ServerState& s = n.state();
    out += csv::row(std::to_string(s.id), render(s.interval.lower), render(s.interval.upper),
                    std::to_string(s.bucket.keys.size()), serialize(s.local_trie));
  }
  return out;
}

inline std::string buckets_csv(const Simulator& sim) {
  std::string out = "server,key\n";
  for (const ServerNode& n : sim.servers()) {
    for (const Key& k : n.state().bucket.keys) out += csv::row(std::to_string(n.id()), k.str());
  }
  return out;
}

inline std::vector<ServerState> parse_state(std::string_view servers, std::string_view buckets,
                                            std::size_t capacity) {
  auto lines = [](std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) out.push_back(line);
    }
    return out;
  };
  auto id_of = [](const std::string& s) {
    ServerId v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad server id '" + s + "'", 0);
    return v;
  };
  std::vector<ServerState> out;
  std::vector<std::size_t> expected;
  for (const std::string& line : lines(servers)) {
    const auto f = csv::split(line);
    if (f.size() != 5) throw ParseError("servers.csv row needs 5 fields", 0);
    ServerState s;
    s.id = id_of(f[0]);
    s.interval = Interval{parse_bound(f[1]), parse_bound(f[2])};
    s.bucket.capacity = capacity;
    s.local_trie = deserialize(f[4]);
    expected.push_back(id_of(f[3]));
    if (s.id != out.size()) throw ParseError("servers.csv rows out of id order", 0);
    out.push_back(std::move(s));
  }
  for (const std::string& line : lines(buckets)) {
    const auto f = csv::split(line);
    if (f.size() != 2) throw ParseError("buckets.csv row needs 2 fields", 0);
    const ServerId id = id_of(f[0]);
    if (id >= out.size()) throw ParseError("bucket for unknown server " + f[0], 0);
    out[id].bucket.keys.emplace_back(f[1]);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::sort(out[i].bucket.keys.begin(), out[i].bucket.keys.end());
    if (out[i].bucket.keys.size() != expected[i]) {
      throw ParseError("server " + std::to_string(i) + " key count does not match buckets.csv", 0);
    }
  }
  return out;
}

inline std::string summary_text(const ExperimentSummary& s) {
  std::string out;
  out += "inserts=" + std::to_string(s.inserts) + "\n";
  out += "keys=" + std::to_string(s.keys) + "\n";
  out += "servers=" + std::to_string(s.servers) + "\n";
  out += "splits=" + std::to_string(s.splits) + "\n";
  out += "final_load_factor=" + format_double(s.final_load_factor) + "\n";
  out += "msgs_per_insert_first_decile=" + format_double(s.msgs_first_decile) + "\n";
  out += "msgs_per_insert_second_decile=" + format_double(s.msgs_second_decile) + "\n";
  out += "msgs_per_insert_last_decile=" + format_double(s.msgs_last_decile) + "\n";
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

/// Writes config.txt, stats.csv, servers.csv, buckets.csv, summary.txt and,
/// when requested, ops.csv into `dir`.
inline void save_run(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "config.txt", r.config.to_text());
  write_file(dir / "stats.csv", stats_csv(r.rows));
  write_file(dir / "servers.csv", servers_csv(*r.sim));
  write_file(dir / "buckets.csv", buckets_csv(*r.sim));
  write_file(dir / "summary.txt", summary_text(r.summary));
  if (r.config.op_log) write_file(dir / "ops.csv", op_log_csv(r.op_log));
}

struct SavedRun {
  ExperimentConfig config;
  std::vector<ServerState> servers;
};

inline SavedRun load_run(const std::filesystem::path& dir) {
  SavedRun run;
  run.config = ExperimentConfig::parse(read_file(dir / "config.txt"));
  run.servers = parse_state(read_file(dir / "servers.csv"), read_file(dir / "buckets.csv"),
                            run.config.bucket_capacity);
  return run;
}

/// Every key a saved run's workload inserted.
inline OracleMap workload_oracle(const ExperimentConfig& cfg) {
  OracleMap o;
  for (const WorkloadItem& w : gen_workload(cfg)) {
    if (w.op.kind == OpKind::insert) o.insert(w.op.key);
  }
  return o;
}

}  // namespace thstar

#endif  // THSTAR_HARNESS_HPP
