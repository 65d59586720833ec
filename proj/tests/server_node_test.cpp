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

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "thstar/server_node.hpp"

using namespace thstar;

namespace {

std::vector<Key> keys(std::initializer_list<const char*> list) {
  std::vector<Key> out;
  for (const char* k : list) out.emplace_back(k);
  return out;
}

RequestEnvelope request(OpKind op, const char* key, Interval region = {}, ServerId target = 0) {
  RequestEnvelope r;
  r.op = op;
  r.client = 1;
  r.op_seq = 1;
  r.key = Key(key);
  r.client_region = region;
  r.image_target = target;
  return r;
}

// Server 0 after the five-key overflow, and the server it spawned.
struct TwoServers {
  ServerNode s0 = ServerNode::initial(4);
  std::optional<ServerNode> s1;
  Coordinator coord;

  TwoServers() {
    for (const char* k : {"abmf", "abnm", "acnm", "aczm"}) s0.insert_local(Key(k));
    EXPECT_EQ(s0.insert_local(Key("acz")), InsertOutcome::split_triggered);
    s1.emplace(s0.split(coord));
  }
};

TEST(ComputeSplitString, Examples) {
  EXPECT_EQ(compute_split_string(keys({"abmf", "abnm", "acnm", "acz", "aczm"}), 4), Bound("acn"));
  EXPECT_EQ(compute_split_string(keys({"a", "z"}), 1), Bound("a"));
  // Median is a prefix of its successor.
  EXPECT_EQ(compute_split_string(keys({"a", "ab", "abc"}), 2), Bound("ab_"));
  EXPECT_THROW(compute_split_string(keys({"a", "b"}), 4), ContractViolation);
}

TEST(ComputeSplitString, MatchesBruteForce) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> len(1, 4);
  std::uniform_int_distribution<int> digit('a', 'c');
  for (int i = 0; i < 500; ++i) {
    const std::size_t b = 4 + static_cast<std::size_t>(i % 3);
    std::set<std::string> set;
    while (set.size() < b + 1) {
      std::string k(static_cast<std::size_t>(len(rng)), 'a');
      for (char& c : k) c = static_cast<char>(digit(rng));
      set.insert(k);
    }
    const std::vector<std::string> sorted(set.begin(), set.end());
    std::vector<Key> ks;
    for (const auto& k : sorted) ks.emplace_back(k);
    ASSERT_EQ(compute_split_string(ks, b).digits(), oracle::split_string(sorted)) << i;
  }
}

TEST(InsertLocal, Outcomes) {
  ServerNode s = ServerNode::initial(4);
  EXPECT_EQ(s.insert_local(Key("abmf")), InsertOutcome::ok);
  EXPECT_EQ(s.insert_local(Key("abmf")), InsertOutcome::duplicate);
  for (const char* k : {"abnm", "acnm", "aczm"}) EXPECT_EQ(s.insert_local(Key(k)), InsertOutcome::ok);
  EXPECT_EQ(s.insert_local(Key("acz")), InsertOutcome::split_triggered);
}

TEST(Split, FiveKeyOverflow) {
  TwoServers w;
  const ServerState& a = w.s0.state();
  const ServerState& b = w.s1->state();
  EXPECT_EQ(a.bucket.keys, keys({"abmf", "abnm", "acnm"}));
  EXPECT_EQ(a.interval, (Interval{Bound::bottom(), Bound("acn")}));
  EXPECT_EQ(b.id, 1u);
  EXPECT_EQ(b.bucket.keys, keys({"acz", "aczm"}));
  EXPECT_EQ(b.interval, (Interval{Bound("acn"), Bound::top()}));
  EXPECT_EQ(serialize(a.local_trie), "I(a,0)I(c,1)I(n,2)L(0)L(1)L(1)L(1)");
  EXPECT_EQ(b.local_trie, a.local_trie);
  EXPECT_EQ(b.depth, 1u);
}

TEST(Split, SecondGeneration) {
  TwoServers w;
  ServerNode s1 = *w.s1;
  for (const char* k : {"mf", "mz", "zz"}) s1.insert_local(Key(k));
  ASSERT_EQ(s1.state().bucket.keys.size(), 5u);
  const ServerState s2 = s1.split(w.coord);
  EXPECT_EQ(s1.state().interval, (Interval{Bound("acn"), Bound("mf")}));
  EXPECT_EQ(s2.interval, (Interval{Bound("mf"), Bound::top()}));
  EXPECT_EQ(s2.id, 2u);
  EXPECT_TRUE(bound_less(s1.state().interval.lower, Bound("mf")));
  for (const Key& k : s1.state().bucket.keys) EXPECT_EQ(search(s1.state().local_trie, k).target, 1u);
  for (const Key& k : s2.bucket.keys) EXPECT_EQ(search(s2.local_trie, k).target, 2u);
}

TEST(Split, AllocationFailureLeavesServerIntact) {
  ServerNode s = ServerNode::initial(1);
  s.insert_local(Key("a"));
  s.insert_local(Key("b"));
  Coordinator full(1);
  const ServerState before = s.state();
  EXPECT_THROW(s.split(full), AllocationError);
  EXPECT_EQ(s.state().bucket.keys, before.bucket.keys);
  EXPECT_EQ(s.state().local_trie, before.local_trie);
}

TEST(HandleRequest, ForwardsForeignKey) {
  TwoServers w;
  const HandleResult r = w.s0.handle_request(request(OpKind::insert, "aczm"), w.coord, KeySpace{});
  ASSERT_TRUE(r.forward.has_value());
  EXPECT_EQ(r.forward->first, 1u);
  EXPECT_EQ(r.forward->second.hops, 1u);
  EXPECT_FALSE(r.reply.has_value());
}

TEST(HandleRequest, CorrectImageGetsNoIam) {
  TwoServers w;
  const HandleResult r = w.s0.handle_request(
      request(OpKind::insert, "abzz", Interval{Bound::bottom(), Bound("acn")}, 0), w.coord, KeySpace{});
  ASSERT_TRUE(r.reply.has_value());
  EXPECT_EQ(r.reply->status, Status::ok);
  EXPECT_FALSE(r.reply->iam.has_value());
}

TEST(HandleRequest, StaleImageGetsIam) {
  TwoServers w;
  const HandleResult r = w.s0.handle_request(request(OpKind::insert, "abzz"), w.coord, KeySpace{});
  ASSERT_TRUE(r.reply.has_value());
  ASSERT_TRUE(r.reply->iam.has_value());
  EXPECT_EQ(r.reply->iam->payload, serialize(w.s0.state().local_trie));
  EXPECT_EQ(r.reply->iam->m, 0u);
  EXPECT_EQ(r.reply->iam->m_prime, 1u);
}

TEST(HandleRequest, DuplicateAndSearch) {
  TwoServers w;
  const Interval mine{Bound::bottom(), Bound("acn")};
  EXPECT_EQ(w.s0.handle_request(request(OpKind::insert, "abmf", mine), w.coord, KeySpace{}).reply->status,
            Status::duplicate);
  EXPECT_EQ(w.s0.handle_request(request(OpKind::search, "abmf", mine), w.coord, KeySpace{}).reply->status,
            Status::ok);
  EXPECT_EQ(w.s0.handle_request(request(OpKind::search, "abmg", mine), w.coord, KeySpace{}).reply->status,
            Status::not_found);
}

TEST(HandleRequest, AllocationFailureRollsBack) {
  ServerNode s = ServerNode::initial(1);
  Coordinator full(1);
  s.handle_request(request(OpKind::insert, "a"), full, KeySpace{});
  const HandleResult r = s.handle_request(request(OpKind::insert, "b"), full, KeySpace{});
  ASSERT_TRUE(r.reply.has_value());
  EXPECT_EQ(r.reply->status, Status::error);
  EXPECT_FALSE(r.spawned.has_value());
  EXPECT_EQ(s.state().bucket.keys, keys({"a"}));
}

TEST(RangeScan, Examples) {
  TwoServers w;
  const RangeSlice r = w.s0.range_scan(Key("abn"), Key("acz"), KeySpace{});
  EXPECT_EQ(r.keys, keys({"abnm", "acnm"}));
  EXPECT_EQ(r.cm_server, Bound("acn"));
  EXPECT_FALSE(r.stop);
  EXPECT_EQ(r.next_hint, 1u);
  const RangeSlice inside = w.s0.range_scan(Key("a"), Key("abz"), KeySpace{});
  EXPECT_TRUE(inside.stop);
  EXPECT_EQ(inside.keys, keys({"abmf", "abnm"}));
  const RangeSlice last = w.s1->range_scan(Key("acz"), Key("zzz"), KeySpace{});
  EXPECT_TRUE(last.stop);
  EXPECT_EQ(last.next_hint, std::nullopt);
}

TEST(Coordinator, Allocation) {
  Coordinator c;
  EXPECT_EQ(c.allocate_server(), 1u);
  for (ServerId i = 2; i <= 8; ++i) EXPECT_EQ(c.allocate_server(), i);
  Coordinator capped(3);
  EXPECT_EQ(capped.allocate_server(), 1u);
  EXPECT_EQ(capped.allocate_server(), 2u);
  EXPECT_THROW(capped.allocate_server(), AllocationError);
}

TEST(ThwnFile, AgreesWithIntervalModel) {
  std::mt19937_64 rng(47);
  const auto all = oracle::all_keys("abcde", 3);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  for (int round = 0; round < 50; ++round) {
    const std::size_t b = 1 + static_cast<std::size_t>(round % 4);
    ThwnFile f(b);
    oracle::IntervalFile model(b);
    for (int i = 0; i < 40; ++i) {
      const std::string k = all[pick(rng)];
      EXPECT_EQ(f.insert(Key(k)) != InsertOutcome::duplicate, model.insert(k));
    }
    ASSERT_EQ(f.buckets().size(), model.size());
    for (const std::string& k : all) ASSERT_EQ(search(f.trie(), Key(k)).target, model.owner(k)) << k;
    const auto want = model.buckets();
    for (std::size_t i = 0; i < want.size(); ++i) {
      std::set<std::string> got;
      for (const Key& k : f.buckets()[i].keys) got.insert(k.str());
      EXPECT_EQ(got, want[i]);
    }
  }
}

}  // namespace
