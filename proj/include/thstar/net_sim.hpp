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

#ifndef THSTAR_NET_SIM_HPP
#define THSTAR_NET_SIM_HPP

// Deterministic in-process transport for servers and clients.
//
// Every message is encoded to bytes on send and decoded on delivery. Each
// hop costs one logical tick; events are delivered in (tick, seq) order,
// with seq assigned at send time, so per-destination FIFO holds and a run is
// a pure function of (config, seed, submitted operations).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "thstar/client.hpp"
#include "thstar/coordinator.hpp"
#include "thstar/errors.hpp"
#include "thstar/key_space.hpp"
#include "thstar/server_node.hpp"
#include "thstar/trie.hpp"
#include "thstar/wire.hpp"

namespace thstar {

struct SimConfig {
  KeySpace key_space;
  std::size_t bucket_capacity = 4;
  std::size_t clients = 4;
  std::uint64_t seed = 1;
  std::optional<std::size_t> server_cap;
  // Chance that an idle client with queued work sits out a scheduling round.
  double skip_probability = 0.25;
  // Run submitted operations one at a time in submission order.
  bool sequential = false;
  // Validate every trie after each mutation and the interval cover after
  // each split; violations throw ProtocolError.
  bool check_invariants = false;
  SplitFault fault;
};

struct SimStats {
  std::uint64_t messages_total = 0;
  std::uint64_t forwards = 0;
  std::uint64_t iams = 0;
  std::uint64_t splits = 0;
  std::uint64_t requests = 0;  // client-originated requests, one per range step
  std::uint64_t ops_completed = 0;
  std::uint64_t errors = 0;
  std::uint64_t ticks = 0;
  std::uint32_t max_hops = 0;
  std::uint32_t max_split_depth = 0;
  std::map<std::uint32_t, std::uint64_t> hop_histogram;  // per completed op

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

struct Address {
  enum class Kind : std::uint8_t { server, client };
  Kind kind = Kind::server;
  std::uint32_t id = 0;
};

struct SimEvent {
  std::uint64_t delivery_tick = 0;
  std::uint64_t seq = 0;
  Address dest;
  std::string bytes;
};

class Simulator {
 public:
  explicit Simulator(SimConfig config) : config_(std::move(config)), rng_(config_.seed) {
    ServerNode zero = ServerNode::initial(config_.bucket_capacity);
    zero.set_fault(config_.fault);
    servers_.push_back(std::move(zero));
    coord_ = Coordinator(config_.server_cap, 1);
    for (std::size_t i = 0; i < config_.clients; ++i) add_client();
  }

  /// Resumes from saved server states; ids must be exactly 0..n-1.
  Simulator(SimConfig config, std::vector<ServerState> restored)
      : config_(std::move(config)), rng_(config_.seed) {
    std::sort(restored.begin(), restored.end(),
              [](const ServerState& a, const ServerState& b) { return a.id < b.id; });
    if (restored.empty()) throw ContractViolation("no server states to restore");
    for (std::size_t i = 0; i < restored.size(); ++i) {
      if (restored[i].id != i) throw ContractViolation("restored server ids are not 0..n-1");
      stored_keys_ += restored[i].bucket.keys.size();
      stats_.max_split_depth = std::max(stats_.max_split_depth, restored[i].depth);
      ServerNode node(std::move(restored[i]));
      node.set_fault(config_.fault);
      servers_.push_back(std::move(node));
    }
    stats_.splits = servers_.size() - 1;
    coord_ = Coordinator(config_.server_cap, static_cast<ServerId>(servers_.size()));
    for (std::size_t i = 0; i < config_.clients; ++i) add_client();
  }

  const SimConfig& config() const noexcept { return config_; }
  const SimStats& stats() const noexcept { return stats_; }
  std::uint64_t tick() const noexcept { return tick_; }
  std::uint64_t stored_keys() const noexcept { return stored_keys_; }

  std::size_t server_count() const noexcept { return servers_.size(); }
  const ServerNode& server(ServerId id) const { return servers_.at(id); }
  const std::vector<ServerNode>& servers() const noexcept { return servers_; }

  /// Client ids start at 1.
  ClientId add_client() {
    const auto id = static_cast<ClientId>(clients_.size() + 1);
    clients_.emplace_back(id, config_.key_space);
    queues_.emplace_back();
    return id;
  }
  std::size_t client_count() const noexcept { return clients_.size(); }
  const Client& client(ClientId id) const { return clients_.at(id - 1); }
  Client& client(ClientId id) { return clients_.at(id - 1); }

  void submit(ClientId id, Operation op) {
    if (id == 0 || id > clients_.size()) throw ContractViolation("unknown client " + std::to_string(id));
    if (config_.sequential) {
      global_queue_.emplace_back(id, std::move(op));
    } else {
      queues_[id - 1].push_back(std::move(op));
    }
    ++queued_;
  }

  void on_complete(std::function<void(const OpResult&)> hook) { hook_ = std::move(hook); }

  /// Delivers events and starts queued operations until nothing is pending
  /// and no client is mid-operation.
  const SimStats& run_until_quiescent() {
    for (;;) {
      start_ready_ops();
      if (events_.empty()) {
        if (queued_ == 0 && in_flight_ == 0) break;
        ++tick_;
        continue;
      }
      while (!events_.empty() && events_.top().delivery_tick <= tick_) {
        SimEvent ev = events_.top();
        events_.pop();
        deliver(ev);
      }
      ++tick_;
    }
    stats_.ticks = tick_;
    return stats_;
  }

  /// Submits one operation and runs to quiescence.
  OpResult execute(ClientId id, Operation op) {
    submit(id, std::move(op));
    run_until_quiescent();
    return last_result_.at(id);
  }

 private:
  struct EventLater {
    bool operator()(const SimEvent& a, const SimEvent& b) const noexcept {
      return a.delivery_tick != b.delivery_tick ? a.delivery_tick > b.delivery_tick : a.seq > b.seq;
    }
  };

  void send(Address dest, std::string bytes) {
    ++stats_.messages_total;
    events_.push(SimEvent{tick_ + 1, next_seq_++, dest, std::move(bytes)});
  }

  void send_request(const Outgoing& out) {
    ++stats_.requests;
    send(Address{Address::Kind::server, out.dest}, encode(out.request));
  }

  void start(ClientId id, Operation op) {
    --queued_;
    ++in_flight_;
    send_request(client(id).begin(std::move(op)));
  }

  void start_ready_ops() {
    if (config_.sequential) {
      if (in_flight_ == 0 && !global_queue_.empty()) {
        auto [id, op] = std::move(global_queue_.front());
        global_queue_.pop_front();
        start(id, std::move(op));
      }
      return;
    }
    if (queued_ == 0) return;
    std::bernoulli_distribution skip(config_.skip_probability);
    const std::size_t n = clients_.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (round_robin_ + k) % n;
      if (clients_[i].busy() || queues_[i].empty()) continue;
      if (skip(rng_)) continue;
      Operation op = std::move(queues_[i].front());
      queues_[i].pop_front();
      start(static_cast<ClientId>(i + 1), std::move(op));
    }
    round_robin_ = (round_robin_ + 1) % n;
  }

  void deliver(const SimEvent& ev) {
    Message msg = decode(ev.bytes);
    if (ev.dest.kind == Address::Kind::server) {
      if (ev.dest.id >= servers_.size()) {
        throw ProtocolError("message to unallocated server " + std::to_string(ev.dest.id));
      }
      auto* req = std::get_if<RequestEnvelope>(&msg);
      if (!req) throw ProtocolError("server received a reply");
      on_server_request(ev.dest.id, *req);
    } else {
      if (ev.dest.id == 0 || ev.dest.id > clients_.size()) {
        throw ProtocolError("message to unknown client " + std::to_string(ev.dest.id));
      }
      auto* rep = std::get_if<ReplyEnvelope>(&msg);
      if (!rep) throw ProtocolError("client received a request");
      on_client_reply(ev.dest.id, *rep);
    }
  }

  void on_server_request(ServerId id, const RequestEnvelope& req) {
    HandleResult r = servers_[id].handle_request(req, coord_, config_.key_space);
    if (r.spawned) {
      if (r.spawned->id != servers_.size()) throw ProtocolError("server ids out of sequence");
      ++stats_.splits;
      stats_.max_split_depth = std::max(stats_.max_split_depth, r.spawned->depth);
      ServerNode node(std::move(*r.spawned));
      node.set_fault(config_.fault);
      servers_.push_back(std::move(node));
      if (config_.check_invariants) {
        check_trie(servers_[id].state().local_trie, "server " + std::to_string(id));
        check_trie(servers_.back().state().local_trie, "server " + std::to_string(servers_.back().id()));
        check_cover();
      }
    }
    if (r.forward) {
      ++stats_.forwards;
      send(Address{Address::Kind::server, r.forward->first}, encode(r.forward->second));
    }
    if (r.reply) {
      if (r.reply->iam) ++stats_.iams;
      if (req.op == OpKind::insert && r.reply->status == Status::ok) ++stored_keys_;
      if (r.reply->hops > stats_.splits) {
        throw ProtocolError("request took " + std::to_string(r.reply->hops) + " forwards after only " +
                            std::to_string(stats_.splits) + " splits");
      }
      send(Address{Address::Kind::client, r.reply->client}, encode(*r.reply));
    }
  }

  void on_client_reply(ClientId id, const ReplyEnvelope& rep) {
    Client& c = client(id);
    const std::uint64_t failures = c.stats().iam_failures;
    auto next = c.on_reply(rep);
    if (c.stats().iam_failures != failures) {
      throw ProtocolError("client " + std::to_string(id) + " could not apply an IAM: " + c.last_iam_error());
    }
    if (config_.check_invariants && rep.iam) check_trie(c.image(), "client " + std::to_string(id));
    if (auto* out = std::get_if<Outgoing>(&next)) {
      send_request(*out);
      return;
    }
    OpResult& done = std::get<OpResult>(next);
    --in_flight_;
    ++stats_.ops_completed;
    if (done.status == Status::error) ++stats_.errors;
    ++stats_.hop_histogram[done.hops];
    stats_.max_hops = std::max(stats_.max_hops, done.hops);
    if (hook_) hook_(done);
    last_result_[id] = std::move(done);
  }

  void check_trie(const Trie& t, const std::string& owner) const {
    auto v = validate(t, config_.key_space.max_key_length);
    if (!v.empty()) throw ProtocolError(owner + " trie invalid: " + v.front().detail);
  }

  void check_cover() const {
    std::vector<const Interval*> ivs;
    ivs.reserve(servers_.size());
    for (const auto& s : servers_) ivs.push_back(&s.state().interval);
    std::sort(ivs.begin(), ivs.end(),
              [](const Interval* a, const Interval* b) { return bound_less(a->lower, b->lower); });
    if (!ivs.front()->lower.is_bottom()) throw ProtocolError("lowest interval does not start at BOTTOM");
    for (std::size_t i = 0; i + 1 < ivs.size(); ++i) {
      if (ivs[i]->upper != ivs[i + 1]->lower) throw ProtocolError("server intervals overlap or leave a gap");
    }
    if (!ivs.back()->upper.is_top()) throw ProtocolError("highest interval does not reach TOP");
  }

  SimConfig config_;
  std::mt19937_64 rng_;
  Coordinator coord_;
  std::vector<ServerNode> servers_;
  std::vector<Client> clients_;
  std::vector<std::deque<Operation>> queues_;
  std::deque<std::pair<ClientId, Operation>> global_queue_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventLater> events_;
  std::map<ClientId, OpResult> last_result_;
  std::function<void(const OpResult&)> hook_;
  SimStats stats_;
  std::uint64_t tick_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t queued_ = 0;
  std::uint64_t in_flight_ = 0;
  std::uint64_t stored_keys_ = 0;
  std::size_t round_robin_ = 0;
};

}  // namespace thstar

#endif  // THSTAR_NET_SIM_HPP
