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

#ifndef THSTAR_COORDINATOR_HPP
#define THSTAR_COORDINATOR_HPP

#include <cstddef>
#include <optional>
#include <string>

#include "thstar/errors.hpp"
#include "thstar/trie.hpp"

namespace thstar {

/// Hands out server ids in allocation order. Server 0 exists from the start;
/// `cap`, when set, bounds the total number of servers.
class Coordinator {
 public:
  explicit Coordinator(std::optional<std::size_t> cap = std::nullopt, ServerId next = 1)
      : cap_(cap), next_(next) {}

  ServerId allocate_server() {
    if (cap_ && static_cast<std::size_t>(next_) >= *cap_) {
      throw AllocationError("server pool exhausted at " + std::to_string(*cap_) + " servers");
    }
    return next_++;
  }

  std::size_t allocated() const noexcept { return next_; }
  std::optional<std::size_t> cap() const noexcept { return cap_; }

 private:
  std::optional<std::size_t> cap_;
  ServerId next_;
};

}  // namespace thstar

#endif  // THSTAR_COORDINATOR_HPP
