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

#ifndef THSTAR_THSTAR_HPP
#define THSTAR_THSTAR_HPP

#include "thstar/client.hpp"
#include "thstar/coordinator.hpp"
#include "thstar/csv.hpp"
#include "thstar/errors.hpp"
#include "thstar/harness.hpp"
#include "thstar/key_space.hpp"
#include "thstar/net_sim.hpp"
#include "thstar/server_node.hpp"
#include "thstar/thwn_file.hpp"
#include "thstar/trie.hpp"
#include "thstar/wire.hpp"

#endif  // THSTAR_THSTAR_HPP
