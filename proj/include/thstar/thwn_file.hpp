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

#ifndef THSTAR_THWN_FILE_HPP
#define THSTAR_THWN_FILE_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "thstar/key_space.hpp"
#include "thstar/server_node.hpp"
#include "thstar/trie.hpp"

namespace thstar {

/// Single-site trie hashing file without nil leaves: one trie addressing
/// numbered buckets. Bucket ids are allocated in split order, the same way
/// the distributed file numbers its servers.
class ThwnFile {
 public:
  explicit ThwnFile(std::size_t capacity) {
    buckets_.push_back(Bucket{{}, capacity});
    intervals_.emplace_back();
  }

  InsertOutcome insert(const Key& k) {
    const ServerId b = search(trie_, k).target;
    Bucket& bucket = buckets_.at(b);
    if (!bucket.insert(k)) return InsertOutcome::duplicate;
    if (!bucket.overflowing()) return InsertOutcome::ok;
    const auto fresh = static_cast<ServerId>(buckets_.size());
    SplitResult r = split_bucket(buckets_[b], intervals_[b], trie_, b, fresh);
    buckets_.push_back(std::move(r.moved));
    intervals_.push_back(std::move(r.moved_interval));
    return InsertOutcome::split_triggered;
  }

  bool contains(const Key& k) const { return buckets_.at(search(trie_, k).target).contains(k); }

  const Trie& trie() const noexcept { return trie_; }
  const std::vector<Bucket>& buckets() const noexcept { return buckets_; }
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }

 private:
  Trie trie_{0};
  std::vector<Bucket> buckets_;
  std::vector<Interval> intervals_;
};

}  // namespace thstar

#endif  // THSTAR_THWN_FILE_HPP
