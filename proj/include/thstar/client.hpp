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

#ifndef THSTAR_CLIENT_HPP
#define THSTAR_CLIENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "thstar/errors.hpp"
#include "thstar/key_space.hpp"
#include "thstar/trie.hpp"
#include "thstar/wire.hpp"

namespace thstar {

struct Operation {
  OpKind kind = OpKind::search;
  Key key;
  Key key_max;

  static Operation insert(Key k) { return {OpKind::insert, std::move(k), Key()}; }
  static Operation search(Key k) { return {OpKind::search, std::move(k), Key()}; }
  static Operation range(Key lo, Key hi) { return {OpKind::range, std::move(lo), std::move(hi)}; }
};

struct OpResult {
  ClientId client = 0;
  std::uint64_t op_seq = 0;
  OpKind kind = OpKind::search;
  Key key;
  Key key_max;
  Status status = Status::ok;
  ServerId first_server = 0;  // server the client's image named first
  ServerId served_by = 0;     // server that executed the (last step of the) op
  std::uint32_t hops = 0;     // forwards across all steps
  std::uint32_t messages = 0;
  bool iam_received = false;
  std::vector<Key> keys;  // range results, in order
  std::string error;
};

struct ClientStats {
  std::uint64_t ops = 0;
  std::uint64_t iams_received = 0;
  std::uint64_t hops_observed = 0;
  std::uint64_t iam_failures = 0;
};

struct Outgoing {
  ServerId dest = 0;
  RequestEnvelope request;
};

/// One logical client with at most one operation in flight. Its image
/// starts as Leaf(0) and only grows through image adjustment messages.
class Client {
 public:
  Client(ClientId id, KeySpace space) : id_(id), space_(std::move(space)) {}

  ClientId id() const noexcept { return id_; }
  const Trie& image() const noexcept { return image_; }
  void set_image(Trie image) { image_ = std::move(image); }
  const ClientStats& stats() const noexcept { return stats_; }
  const std::string& last_iam_error() const noexcept { return last_iam_error_; }
  bool busy() const noexcept { return pending_.has_value(); }

  SearchOutcome address(const Key& k) const { return search(image_, k); }

  /// Starts `op` and returns the first request to send.
  Outgoing begin(Operation op) {
    if (pending_) throw ContractViolation("client already has an operation in flight");
    if (op.kind == OpKind::range && op.key_max < op.key) {
      throw ContractViolation("range rejected: kmin > kmax");
    }
    Pending p;
    p.seq = ++next_seq_;
    p.op = std::move(op);
    p.addressed = address(p.op.key);
    p.first_server = p.addressed.target;
    pending_ = std::move(p);
    return Outgoing{pending_->first_server, make_request(pending_->op.key, pending_->addressed)};
  }

  /// Consumes a reply: applies any IAM, then either continues a range scan
  /// with the next request or finishes the operation.
  std::variant<Outgoing, OpResult> on_reply(const ReplyEnvelope& rep) {
    if (!pending_ || rep.op_seq != pending_->seq || rep.client != id_) {
      throw ProtocolError("client " + std::to_string(id_) + " got an unexpected reply");
    }
    Pending& p = *pending_;
    p.hops += rep.hops;
    p.messages += 2 + rep.hops;
    p.served_by = rep.server;
    if (rep.iam) {
      p.iam = true;
      ++stats_.iams_received;
      apply_iam(*rep.iam, p.addressed.locator);
    }
    if (p.op.kind == OpKind::range && rep.status == Status::ok && rep.range) {
      p.keys.insert(p.keys.end(), rep.range->keys.begin(), rep.range->keys.end());
      if (!rep.range->stop) {
        std::optional<Key> next = space_.first_key_above(rep.range->cm_server);
        if (next && !(p.op.key_max < *next)) {
          p.addressed = address(*next);
          const ServerId dest = rep.range->next_hint.value_or(p.addressed.target);
          return Outgoing{dest, make_request(*next, p.addressed)};
        }
      }
    }
    OpResult r;
    r.client = id_;
    r.op_seq = p.seq;
    r.kind = p.op.kind;
    r.key = std::move(p.op.key);
    r.key_max = std::move(p.op.key_max);
    r.status = rep.status;
    r.first_server = p.first_server;
    r.served_by = p.served_by;
    r.hops = p.hops;
    r.messages = p.messages;
    r.iam_received = p.iam;
    r.keys = std::move(p.keys);
    r.error = rep.error;
    ++stats_.ops;
    stats_.hops_observed += p.hops;
    pending_.reset();
    return r;
  }

  /// Grafts the IAM sub-trie at `loc`. A payload that does not parse or
  /// does not fit the leaf leaves the image unchanged and returns false.
  bool apply_iam(const Iam& iam, const LeafLocator& loc) {
    try {
      image_ = graft(image_, loc, deserialize(iam.payload), iam.m, iam.m_prime);
      return true;
    } catch (const Error& e) {
      ++stats_.iam_failures;
      last_iam_error_ = e.what();
      return false;
    }
  }

 private:
  struct Pending {
    std::uint64_t seq = 0;
    Operation op;
    SearchOutcome addressed;
    ServerId first_server = 0;
    ServerId served_by = 0;
    std::uint32_t hops = 0;
    std::uint32_t messages = 0;
    bool iam = false;
    std::vector<Key> keys;
  };

  RequestEnvelope make_request(const Key& key, const SearchOutcome& addressed) const {
    RequestEnvelope r;
    r.op = pending_->op.kind;
    r.client = id_;
    r.op_seq = pending_->seq;
    r.key = key;
    r.key_max = pending_->op.key_max;
    r.client_region = addressed.region();
    r.image_target = addressed.target;
    return r;
  }

  ClientId id_;
  KeySpace space_;
  Trie image_{0};
  ClientStats stats_;
  std::string last_iam_error_;
  std::uint64_t next_seq_ = 0;
  std::optional<Pending> pending_;
};

}  // namespace thstar

#endif  // THSTAR_CLIENT_HPP
