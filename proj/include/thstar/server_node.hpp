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

#ifndef THSTAR_SERVER_NODE_HPP
#define THSTAR_SERVER_NODE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thstar/coordinator.hpp"
#include "thstar/errors.hpp"
#include "thstar/key_space.hpp"
#include "thstar/trie.hpp"
#include "thstar/wire.hpp"

namespace thstar {

/// Sorted, duplicate-free keys. Holds capacity + 1 keys only while a split
/// is pending.
struct Bucket {
  std::vector<Key> keys;
  std::size_t capacity = 4;

  bool contains(const Key& k) const { return std::binary_search(keys.begin(), keys.end(), k); }

  /// False when `k` is already present.
  bool insert(Key k) {
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    if (it != keys.end() && *it == k) return false;
    keys.insert(it, std::move(k));
    return true;
  }

  bool erase(const Key& k) {
    auto it = std::lower_bound(keys.begin(), keys.end(), k);
    if (it == keys.end() || *it != k) return false;
    keys.erase(it);
    return true;
  }

  bool overflowing() const noexcept { return keys.size() > capacity; }
};

enum class InsertOutcome { ok, duplicate, split_triggered };

/// Split string for an overflowing bucket: the shortest prefix of the median
/// key keys[ceil((b+1)/2)] (1-based) that its successor exceeds. When the
/// median is a prefix of its successor no such prefix exists, and the median
/// followed by the minimal digit separates them instead.
inline Bound compute_split_string(std::span<const Key> keys, std::size_t capacity) {
  if (capacity == 0 || keys.size() != capacity + 1) {
    throw ContractViolation("split needs exactly capacity + 1 keys");
  }
  const std::size_t median = (capacity + 2) / 2;  // 1-based
  const std::string& m = keys[median - 1].str();
  const std::string& next = keys[median].str();
  if (!(keys[median - 1] < keys[median])) throw ContractViolation("split keys not strictly sorted");
  for (std::size_t len = 1; len <= m.size(); ++len) {
    if (detail::key_side(next, std::string_view(m).substr(0, len)) == KeySide::gt) {
      return Bound(m.substr(0, len));
    }
  }
  return Bound(m + kMinDigit);
}

/// Outcome of splitting one bucket: the keys and interval handed to the new
/// owner.
struct SplitResult {
  Bound split_string;
  Bucket moved;
  Interval moved_interval;
};

/// Fault hooks for negative-control runs.
struct SplitFault {
  bool drop_one_moved_key = false;
};

/// Splits `bucket` (owned by `self` over `interval`, addressed through
/// `trie`) in favour of `fresh`. Keys above the split string leave the
/// bucket; every leaf of `trie` above it inside the interval now names
/// `fresh`.
inline SplitResult split_bucket(Bucket& bucket, Interval& interval, Trie& trie, ServerId self,
                                ServerId fresh, SplitFault fault = {}) {
  SplitResult r;
  r.split_string = compute_split_string(bucket.keys, bucket.capacity);
  const Bound& c = r.split_string;

  auto cut = std::partition_point(bucket.keys.begin(), bucket.keys.end(),
                                  [&c](const Key& k) { return bound_compare(k, c) == KeySide::le; });
  r.moved.capacity = bucket.capacity;
  r.moved.keys.assign(std::make_move_iterator(cut), std::make_move_iterator(bucket.keys.end()));
  bucket.keys.erase(cut, bucket.keys.end());
  if (fault.drop_one_moved_key && !r.moved.keys.empty()) r.moved.keys.erase(r.moved.keys.begin());

  r.moved_interval = Interval{c, interval.upper};
  interval.upper = c;

  SearchOutcome at = locate_bound(trie, c);
  if (at.target != self) {
    throw StructuralCorruption("split string '" + c.digits() + "' falls in a leaf of server " +
                               std::to_string(at.target));
  }
  if (at.cm != c) {
    trie = attach_split(std::move(trie), at.locator, c, fresh);
    at = locate_bound(trie, c);
  }
  trie = reassign_following(std::move(trie), at.locator, r.moved_interval.upper, fresh);
  return r;
}

struct ServerState {
  ServerId id = 0;
  Bucket bucket;
  Trie local_trie;
  Interval interval;
  std::uint32_t depth = 0;  // generation in the split genealogy
};

struct HandleResult {
  std::optional<std::pair<ServerId, RequestEnvelope>> forward;
  std::optional<ReplyEnvelope> reply;
  std::optional<ServerState> spawned;
};

class ServerNode {
 public:
  explicit ServerNode(ServerState state) : state_(std::move(state)) {}

  /// Server 0: empty bucket, interval (BOTTOM, TOP], trie Leaf(0).
  static ServerNode initial(std::size_t capacity) {
    ServerState s;
    s.bucket.capacity = capacity;
    return ServerNode(std::move(s));
  }

  const ServerState& state() const noexcept { return state_; }
  ServerId id() const noexcept { return state_.id; }
  void set_fault(SplitFault fault) noexcept { fault_ = fault; }

  InsertOutcome insert_local(const Key& k) {
    if (!state_.interval.contains(k)) {
      throw ContractViolation("key '" + k.str() + "' outside interval of server " +
                              std::to_string(state_.id));
    }
    if (!state_.bucket.insert(k)) return InsertOutcome::duplicate;
    return state_.bucket.overflowing() ? InsertOutcome::split_triggered : InsertOutcome::ok;
  }

  /// Moves the upper half of an overflowing bucket to a newly allocated
  /// server and returns that server's state. Allocation failure leaves this
  /// server untouched.
  ServerState split(Coordinator& coord) {
    if (state_.bucket.keys.size() != state_.bucket.capacity + 1) {
      throw ContractViolation("split of a bucket that is not overflowing");
    }
    const ServerId fresh = coord.allocate_server();
    SplitResult r =
        split_bucket(state_.bucket, state_.interval, state_.local_trie, state_.id, fresh, fault_);
    ServerState next;
    next.id = fresh;
    next.bucket = std::move(r.moved);
    next.local_trie = state_.local_trie;
    next.interval = std::move(r.moved_interval);
    next.depth = state_.depth + 1;
    return next;
  }

  /// True when the client's leaf for `req.key` differs from this server's
  /// leaf for it, or the request was forwarded.
  bool needs_iam(const RequestEnvelope& req) const {
    if (req.hops > 0) return true;
    const SearchOutcome mine = search(state_.local_trie, req.key);
    return mine.target != req.image_target || mine.region() != req.client_region;
  }

  /// The local sub-trie covering the client's leaf region, to be grafted in
  /// place of the client's leaf for `image_target`.
  Iam build_iam(const Interval& client_region, ServerId image_target) const {
    std::optional<Trie> sub = extract_subtrie(state_.local_trie, client_region);
    if (!sub) {
      throw StructuralCorruption("server " + std::to_string(state_.id) +
                                 " has no node for client region (" + render(client_region.lower) +
                                 ", " + render(client_region.upper) + "]");
    }
    return Iam{serialize(*sub), image_target, last_target(*sub)};
  }

  RangeSlice range_scan(const Key& kmin, const Key& kmax, const KeySpace& space) const {
    RangeSlice out;
    const auto& keys = state_.bucket.keys;
    auto lo = std::lower_bound(keys.begin(), keys.end(), kmin);
    auto hi = std::upper_bound(keys.begin(), keys.end(), kmax);
    if (lo < hi) out.keys.assign(lo, hi);
    out.cm_server = state_.interval.upper;
    out.stop = bound_compare(kmax, out.cm_server) == KeySide::le;
    if (!out.stop) {
      if (auto above = space.first_key_above(out.cm_server)) {
        out.next_hint = search(state_.local_trie, *above).target;
      } else {
        out.stop = true;
      }
    }
    return out;
  }

  HandleResult handle_request(const RequestEnvelope& req, Coordinator& coord,
                              const KeySpace& space) {
    HandleResult out;
    if (!state_.interval.contains(req.key)) {
      const ServerId next = search(state_.local_trie, req.key).target;
      if (next == state_.id) {
        out.reply = reply_to(req, Status::error);
        out.reply->error = "structural corruption: server " + std::to_string(state_.id) +
                           " would forward '" + req.key.str() + "' to itself";
        return out;
      }
      RequestEnvelope fwd = req;
      ++fwd.hops;
      out.forward.emplace(next, std::move(fwd));
      return out;
    }

    ReplyEnvelope rep = reply_to(req, Status::ok);
    switch (req.op) {
      case OpKind::insert:
        switch (insert_local(req.key)) {
          case InsertOutcome::duplicate:
            rep.status = Status::duplicate;
            break;
          case InsertOutcome::split_triggered:
            try {
              out.spawned = split(coord);
            } catch (const AllocationError& e) {
              state_.bucket.erase(req.key);
              rep.status = Status::error;
              rep.error = e.what();
              out.reply = std::move(rep);
              return out;
            }
            break;
          case InsertOutcome::ok:
            break;
        }
        break;
      case OpKind::search:
        rep.status = state_.bucket.contains(req.key) ? Status::ok : Status::not_found;
        break;
      case OpKind::range:
        if (req.key_max < req.key) {
          rep.status = Status::error;
          rep.error = "range with kmin > kmax";
          out.reply = std::move(rep);
          return out;
        }
        rep.range = range_scan(req.key, req.key_max, space);
        break;
    }
    if (needs_iam(req)) rep.iam = build_iam(req.client_region, req.image_target);
    out.reply = std::move(rep);
    return out;
  }

 private:
  ReplyEnvelope reply_to(const RequestEnvelope& req, Status status) const {
    ReplyEnvelope rep;
    rep.status = status;
    rep.server = state_.id;
    rep.client = req.client;
    rep.op_seq = req.op_seq;
    rep.hops = req.hops;
    return rep;
  }

  ServerState state_;
  SplitFault fault_;
};

}  // namespace thstar

#endif  // THSTAR_SERVER_NODE_HPP
