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

#ifndef THSTAR_TRIE_HPP
#define THSTAR_TRIE_HPP

// Nil-free binary trie of (digit, position) nodes.
//
// Descent keeps the upper bound B of the current region (initially TOP). At
// an internal node (d, i) the candidate bound is the first i digits of B
// followed by d. Keys on the low side of the candidate go left and B becomes
// the candidate; the others go right with B unchanged. Leaves therefore own
// contiguous intervals (previous leaf bound, B] that tile the key space in
// order.
//
// Nodes live in one vector with the root at index 0, so copies are flat and
// destruction never recurses. Every traversal below is iterative: ascending
// workloads grow the right spine without bound.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thstar/errors.hpp"
#include "thstar/key_space.hpp"

namespace thstar {

using ServerId = std::uint32_t;

/// Only reachable through hand-built node vectors; validate() reports it.
inline constexpr ServerId kNoServer = std::numeric_limits<ServerId>::max();

struct TrieNode {
  char digit = 0;
  std::uint16_t position = 0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  ServerId target = kNoServer;

  bool is_leaf() const noexcept { return left < 0 && right < 0; }

  static TrieNode leaf(ServerId target) noexcept {
    TrieNode n;
    n.target = target;
    return n;
  }

  static TrieNode internal(char digit, std::uint16_t position, std::int32_t left,
                           std::int32_t right) noexcept {
    TrieNode n;
    n.digit = digit;
    n.position = position;
    n.left = left;
    n.right = right;
    return n;
  }
};

class Trie;

namespace detail {
struct TrieAccess;
}

class Trie {
 public:
  /// Single leaf addressing `target`.
  explicit Trie(ServerId target = 0) : nodes_{TrieNode::leaf(target)} {}

  /// Internal node over copies of two sub-tries.
  static Trie node(char digit, std::uint16_t position, const Trie& left, const Trie& right);

  /// Unchecked construction, root at index 0. Run validate() on the result.
  static Trie from_nodes(std::vector<TrieNode> nodes) {
    if (nodes.empty()) throw ContractViolation("trie needs a root node");
    Trie t;
    t.nodes_ = std::move(nodes);
    return t;
  }

  const std::vector<TrieNode>& nodes() const noexcept { return nodes_; }
  const TrieNode& root() const noexcept { return nodes_.front(); }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::size_t leaf_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TrieNode& n) { return n.is_leaf(); }));
  }

  friend bool operator==(const Trie& a, const Trie& b);

 private:
  friend struct detail::TrieAccess;
  std::vector<TrieNode> nodes_;
};

enum class Turn : std::uint8_t { left, right };

/// Handle on one leaf: the turns from the root plus the bound B the descent
/// computed on arrival.
struct LeafLocator {
  std::vector<Turn> path;
  Bound upper;

  friend bool operator==(const LeafLocator&, const LeafLocator&) = default;
};

struct SearchOutcome {
  ServerId target = kNoServer;
  Bound cm;                          // upper bound of the leaf's interval
  Bound lower = Bound::bottom();     // exclusive lower bound of the leaf's interval
  LeafLocator locator;

  Interval region() const { return Interval{lower, cm}; }
};

struct LeafEntry {
  ServerId target = kNoServer;
  Bound upper;

  friend bool operator==(const LeafEntry&, const LeafEntry&) = default;
};

namespace detail {

struct TrieAccess {
  static std::vector<TrieNode>& nodes(Trie& t) noexcept { return t.nodes_; }
};

// Position in a descent: node index and the bounds of its region. `upper`
// holds B; an empty string is TOP.
struct Cursor {
  std::int32_t node = 0;
  Bound lower = Bound::bottom();
  std::string upper;
};

inline const TrieNode& at(const std::vector<TrieNode>& nodes, std::int32_t i) {
  if (i < 0 || static_cast<std::size_t>(i) >= nodes.size()) {
    throw StructuralCorruption("dangling child link " + std::to_string(i));
  }
  return nodes[static_cast<std::size_t>(i)];
}

inline std::string candidate(const TrieNode& n, std::string_view upper) {
  if (n.position > upper.size()) {
    throw StructuralCorruption("node at position " + std::to_string(n.position) +
                               " reached with a bound of length " + std::to_string(upper.size()));
  }
  std::string c(upper.substr(0, n.position));
  c.push_back(n.digit);
  return c;
}

inline void step(const std::vector<TrieNode>& nodes, Cursor& c, Turn turn) {
  const TrieNode& n = at(nodes, c.node);
  if (n.is_leaf()) throw InvalidLocator("path continues below a leaf");
  if (n.left < 0 || n.right < 0) throw StructuralCorruption("internal node with one child");
  std::string cand = candidate(n, c.upper);
  if (turn == Turn::left) {
    c.upper = std::move(cand);
    c.node = n.left;
  } else {
    c.lower = Bound(std::move(cand));
    c.node = n.right;
  }
}

inline Cursor walk(const std::vector<TrieNode>& nodes, const std::vector<Turn>& path) {
  Cursor c;
  for (Turn t : path) step(nodes, c, t);
  return c;
}

// Resolves a locator to its leaf, rejecting paths that no longer end at a
// leaf with the recorded bound.
inline Cursor resolve(const std::vector<TrieNode>& nodes, const LeafLocator& loc) {
  Cursor c = walk(nodes, loc.path);
  if (!at(nodes, c.node).is_leaf()) throw InvalidLocator("locator does not end at a leaf");
  if (Bound(c.upper) != loc.upper) throw InvalidLocator("stale locator bound");
  return c;
}

// Copies the sub-trie of `src` rooted at `src_root` into `dst`. The copy's
// root overwrites `dst[slot]`, or is appended when slot < 0. Returns the
// root's index in `dst`.
inline std::int32_t copy_subtree(std::vector<TrieNode>& dst, const std::vector<TrieNode>& src,
                                 std::int32_t src_root, std::int32_t slot = -1) {
  if (slot < 0) {
    dst.emplace_back();
    slot = static_cast<std::int32_t>(dst.size() - 1);
  }
  std::vector<std::pair<std::int32_t, std::int32_t>> stack{{src_root, slot}};
  while (!stack.empty()) {
    auto [s, d] = stack.back();
    stack.pop_back();
    TrieNode n = at(src, s);
    if (!n.is_leaf()) {
      const std::int32_t src_left = n.left;
      const std::int32_t src_right = n.right;
      n.left = static_cast<std::int32_t>(dst.size());
      n.right = n.left + 1;
      dst.emplace_back();
      dst.emplace_back();
      stack.emplace_back(src_right, n.right);
      stack.emplace_back(src_left, n.left);
    }
    dst[static_cast<std::size_t>(d)] = n;
  }
  return slot;
}

}  // namespace detail

inline Trie Trie::node(char digit, std::uint16_t position, const Trie& left, const Trie& right) {
  Trie t;
  t.nodes_.front() = TrieNode::internal(digit, position, -1, -1);
  const std::int32_t l = detail::copy_subtree(t.nodes_, left.nodes_, 0);
  const std::int32_t r = detail::copy_subtree(t.nodes_, right.nodes_, 0);
  t.nodes_.front().left = l;
  t.nodes_.front().right = r;
  return t;
}

inline bool operator==(const Trie& a, const Trie& b) {
  std::vector<std::pair<std::int32_t, std::int32_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    const TrieNode& x = detail::at(a.nodes_, i);
    const TrieNode& y = detail::at(b.nodes_, j);
    if (x.is_leaf() != y.is_leaf()) return false;
    if (x.is_leaf()) {
      if (x.target != y.target) return false;
      continue;
    }
    if (x.digit != y.digit || x.position != y.position) return false;
    stack.emplace_back(x.right, y.right);
    stack.emplace_back(x.left, y.left);
  }
  return true;
}

/// Routes `k` to its leaf.
inline SearchOutcome search(const Trie& t, const Key& k) {
  const auto& nodes = t.nodes();
  detail::Cursor c;
  SearchOutcome out;
  for (;;) {
    const TrieNode& n = detail::at(nodes, c.node);
    if (n.is_leaf()) break;
    if (n.left < 0 || n.right < 0) throw StructuralCorruption("internal node with one child");
    if (n.position > c.upper.size()) {
      throw StructuralCorruption("descent bound shorter than node position");
    }
    const std::string_view prefix = std::string_view(c.upper).substr(0, n.position);
    if (detail::key_side(k.str(), prefix, n.digit) == KeySide::le) {
      c.upper.resize(n.position);
      c.upper.push_back(n.digit);
      c.node = n.left;
      out.locator.path.push_back(Turn::left);
    } else {
      c.lower = Bound(detail::candidate(n, c.upper));
      c.node = n.right;
      out.locator.path.push_back(Turn::right);
    }
  }
  out.target = nodes[static_cast<std::size_t>(c.node)].target;
  out.cm = Bound(c.upper);
  out.lower = std::move(c.lower);
  out.locator.upper = out.cm;
  return out;
}

/// In-order leaves with their upper bounds.
inline std::vector<LeafEntry> leaf_sequence(const Trie& t) {
  const auto& nodes = t.nodes();
  std::vector<LeafEntry> out;
  std::vector<std::pair<std::int32_t, std::string>> stack;
  stack.emplace_back(0, std::string());
  while (!stack.empty()) {
    auto [i, upper] = std::move(stack.back());
    stack.pop_back();
    const TrieNode& n = detail::at(nodes, i);
    if (n.is_leaf()) {
      out.push_back(LeafEntry{n.target, Bound(std::move(upper))});
      continue;
    }
    std::string cand = detail::candidate(n, upper);
    stack.emplace_back(n.right, std::move(upper));
    stack.emplace_back(n.left, std::move(cand));
  }
  return out;
}

/// Leaf addressed by `path`, with its computed bound.
inline LeafLocator locator_at(const Trie& t, std::vector<Turn> path) {
  detail::Cursor c = detail::walk(t.nodes(), path);
  if (!detail::at(t.nodes(), c.node).is_leaf()) throw InvalidLocator("path ends at an internal node");
  return LeafLocator{std::move(path), Bound(std::move(c.upper))};
}

/// Next leaf in order after `loc`, or nothing after the last leaf.
inline std::optional<LeafLocator> successor_leaf(const Trie& t, const LeafLocator& loc) {
  detail::resolve(t.nodes(), loc);
  auto last_left = std::find(loc.path.rbegin(), loc.path.rend(), Turn::left);
  if (last_left == loc.path.rend()) return std::nullopt;
  std::vector<Turn> path(loc.path.begin(), std::prev(last_left.base()));
  path.push_back(Turn::right);
  detail::Cursor c = detail::walk(t.nodes(), path);
  while (!detail::at(t.nodes(), c.node).is_leaf()) {
    detail::step(t.nodes(), c, Turn::left);
    path.push_back(Turn::left);
  }
  return LeafLocator{std::move(path), Bound(std::move(c.upper))};
}

/// Leaf whose interval (lower, upper] holds the bound `c`.
inline SearchOutcome locate_bound(const Trie& t, const Bound& c) {
  if (c.is_bottom()) throw ContractViolation("cannot locate BOTTOM");
  const auto& nodes = t.nodes();
  detail::Cursor cur;
  SearchOutcome out;
  while (!detail::at(nodes, cur.node).is_leaf()) {
    const TrieNode& n = nodes[static_cast<std::size_t>(cur.node)];
    const Bound cand(detail::candidate(n, cur.upper));
    const Turn turn = bound_order(c, cand) <= 0 ? Turn::left : Turn::right;
    detail::step(nodes, cur, turn);
    out.locator.path.push_back(turn);
  }
  out.target = nodes[static_cast<std::size_t>(cur.node)].target;
  out.cm = Bound(cur.upper);
  out.lower = std::move(cur.lower);
  out.locator.upper = out.cm;
  return out;
}

/// Replaces the leaf at `loc` (target m) by the nil-free chain for `split`:
/// every right child of the chain addresses `new_target`, the innermost left
/// child keeps m. The chain starts at the first position where `split`
/// departs from the leaf's upper bound; digits before it are already implied
/// by the descent.
inline Trie attach_split(Trie t, const LeafLocator& loc, const Bound& split, ServerId new_target) {
  auto& nodes = detail::TrieAccess::nodes(t);
  const detail::Cursor c = detail::resolve(nodes, loc);
  if (split.is_bottom() || split.is_top()) {
    throw SplitBoundViolation("split string must be a non-empty digit sequence");
  }
  const Bound upper(c.upper);
  if (!bound_less(c.lower, split) || !bound_less(split, upper)) {
    throw SplitBoundViolation("split string '" + split.digits() + "' outside leaf interval (" +
                              render(c.lower) + ", " + render(upper) + "]");
  }
  const std::string& digits = split.digits();
  if (digits.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw SplitBoundViolation("split string too long");
  }
  const std::size_t first =
      static_cast<std::size_t>(std::mismatch(digits.begin(), digits.end(), c.upper.begin(),
                                             c.upper.end())
                                   .first -
                               digits.begin());
  const ServerId old_target = nodes[static_cast<std::size_t>(c.node)].target;
  std::int32_t slot = c.node;
  for (std::size_t j = first; j < digits.size(); ++j) {
    const auto right = static_cast<std::int32_t>(nodes.size());
    nodes.push_back(TrieNode::leaf(new_target));
    const auto left = static_cast<std::int32_t>(nodes.size());
    nodes.push_back(TrieNode::leaf(old_target));
    nodes[static_cast<std::size_t>(slot)] =
        TrieNode::internal(digits[j], static_cast<std::uint16_t>(j), left, right);
    slot = left;
  }
  return t;
}

/// Sub-trie whose root region is exactly `region`, if `t` has such a node.
inline std::optional<Trie> extract_subtrie(const Trie& t, const Interval& region) {
  const auto& nodes = t.nodes();
  detail::Cursor c;
  for (;;) {
    if (c.lower == region.lower && Bound(c.upper) == region.upper) {
      Trie out;
      detail::copy_subtree(detail::TrieAccess::nodes(out), nodes, c.node, 0);
      return out;
    }
    const TrieNode& n = detail::at(nodes, c.node);
    if (n.is_leaf()) return std::nullopt;
    const Bound cand(detail::candidate(n, c.upper));
    if (bound_order(region.upper, cand) <= 0) {
      detail::step(nodes, c, Turn::left);
    } else if (bound_order(region.lower, cand) >= 0) {
      detail::step(nodes, c, Turn::right);
    } else {
      return std::nullopt;
    }
  }
}

namespace detail {

// Retargets consecutive leaves after `from` while `keep_going(leaf)` holds.
template <typename Pred>
void retarget_following(Trie& t, LeafLocator from, ServerId to, Pred keep_going) {
  auto& nodes = TrieAccess::nodes(t);
  while (auto next = successor_leaf(t, from)) {
    const Cursor c = walk(nodes, next->path);
    TrieNode& leaf = nodes[static_cast<std::size_t>(c.node)];
    if (!keep_going(leaf, next->upper)) break;
    leaf.target = to;
    from = std::move(*next);
  }
}

inline LeafLocator rightmost_below(const Trie& t, std::vector<Turn> path) {
  Cursor c = walk(t.nodes(), path);
  while (!at(t.nodes(), c.node).is_leaf()) {
    step(t.nodes(), c, Turn::right);
    path.push_back(Turn::right);
  }
  return LeafLocator{std::move(path), Bound(std::move(c.upper))};
}

}  // namespace detail

/// Target of the in-order last leaf.
inline ServerId last_target(const Trie& t) {
  std::int32_t i = 0;
  while (!detail::at(t.nodes(), i).is_leaf()) i = t.nodes()[static_cast<std::size_t>(i)].right;
  return t.nodes()[static_cast<std::size_t>(i)].target;
}

/// Replaces Leaf(m) at `loc` by `donor`, then hands the run of leaves that
/// follow and still address m over to `new_target`, the donor's last leaf.
inline Trie graft(Trie image, const LeafLocator& loc, const Trie& donor, ServerId m,
                  ServerId new_target) {
  auto& nodes = detail::TrieAccess::nodes(image);
  const detail::Cursor c = detail::resolve(nodes, loc);
  if (nodes[static_cast<std::size_t>(c.node)].target != m) {
    throw GraftMismatch("leaf addresses server " +
                        std::to_string(nodes[static_cast<std::size_t>(c.node)].target) +
                        ", expected " + std::to_string(m));
  }
  if (last_target(donor) != new_target) {
    throw GraftMismatch("donor's last leaf does not address " + std::to_string(new_target));
  }
  detail::copy_subtree(nodes, donor.nodes(), 0, c.node);
  LeafLocator last = detail::rightmost_below(image, loc.path);
  detail::retarget_following(image, std::move(last), new_target,
                             [m](const TrieNode& leaf, const Bound&) { return leaf.target == m; });
  return image;
}

/// Readdresses every leaf after `from` whose upper bound is at most
/// `through` to `to`.
inline Trie reassign_following(Trie t, const LeafLocator& from, const Bound& through, ServerId to) {
  detail::retarget_following(t, from, to, [&through](const TrieNode&, const Bound& upper) {
    return bound_order(upper, through) <= 0;
  });
  return t;
}

// Preorder text: node := "I(" digit "," pos ")" node node | "L(" id ")".
inline std::string serialize(const Trie& t) {
  const auto& nodes = t.nodes();
  std::string out;
  out.reserve(nodes.size() * 6);
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const TrieNode& n = detail::at(nodes, stack.back());
    stack.pop_back();
    if (n.is_leaf()) {
      out += "L(";
      out += std::to_string(n.target);
      out += ')';
    } else {
      out += "I(";
      out += n.digit;
      out += ',';
      out += std::to_string(n.position);
      out += ')';
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

inline Trie deserialize(std::string_view text) {
  std::vector<TrieNode> nodes;
  // Each pending slot is (parent index, is-left-child); the root has parent -1.
  std::vector<std::pair<std::int32_t, bool>> pending{{-1, true}};
  std::size_t pos = 0;

  auto expect = [&](char c) {
    if (pos >= text.size() || text[pos] != c) {
      throw ParseError(std::string("expected '") + c + "'", pos);
    }
    ++pos;
  };
  auto number = [&]() -> std::uint64_t {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
    if (ec != std::errc() || ptr == text.data() + pos) throw ParseError("expected a number", pos);
    pos = static_cast<std::size_t>(ptr - text.data());
    return v;
  };

  while (!pending.empty()) {
    auto [parent, is_left] = pending.back();
    pending.pop_back();
    if (pos >= text.size()) throw ParseError("unexpected end of trie text", pos);
    const std::size_t start = pos;
    TrieNode n;
    switch (text[pos]) {
      case 'N':
        throw NilRejected(pos);
      case 'L': {
        ++pos;
        expect('(');
        if (pos < text.size() && text[pos] == ')') throw NilRejected(start);
        const std::uint64_t id = number();
        if (id >= kNoServer) throw ParseError("server id out of range", start);
        expect(')');
        n = TrieNode::leaf(static_cast<ServerId>(id));
        break;
      }
      case 'I': {
        ++pos;
        expect('(');
        if (pos >= text.size()) throw ParseError("missing digit", pos);
        const char d = text[pos];
        if (d == kMaxDigit) throw ParseError("maximal digit in a node", pos);
        ++pos;
        expect(',');
        const std::uint64_t p = number();
        if (p > std::numeric_limits<std::uint16_t>::max()) {
          throw ParseError("position out of range", start);
        }
        expect(')');
        n = TrieNode::internal(d, static_cast<std::uint16_t>(p), -1, -1);
        break;
      }
      default:
        throw ParseError("expected 'I', 'L' or 'N'", pos);
    }
    const auto index = static_cast<std::int32_t>(nodes.size());
    nodes.push_back(n);
    if (parent >= 0) {
      auto& p = nodes[static_cast<std::size_t>(parent)];
      (is_left ? p.left : p.right) = index;
    }
    if (text[start] == 'I') {
      pending.emplace_back(index, false);
      pending.emplace_back(index, true);
    }
  }
  if (pos != text.size()) throw ParseError("trailing bytes after trie", pos);
  return Trie::from_nodes(std::move(nodes));
}

struct Violation {
  enum class Kind {
    nil_leaf,
    bad_link,
    bad_position,
    bad_digit,
    broken_descent,
    non_monotone,
    last_not_top,
  };
  Kind kind;
  std::string detail;
};

/// Empty iff the trie is nil-free, well linked, every position is at most
/// `max_position`, and leaf bounds strictly increase up to TOP.
inline std::vector<Violation> validate(const Trie& t, std::size_t max_position = 32) {
  using Kind = Violation::Kind;
  const auto& nodes = t.nodes();
  std::vector<Violation> out;
  std::vector<bool> seen(nodes.size(), false);
  std::vector<std::pair<std::int32_t, std::string>> stack;
  stack.emplace_back(0, std::string());
  std::optional<Bound> previous;
  while (!stack.empty()) {
    auto [i, upper] = std::move(stack.back());
    stack.pop_back();
    if (i < 0 || static_cast<std::size_t>(i) >= nodes.size() || seen[static_cast<std::size_t>(i)]) {
      out.push_back({Kind::bad_link, "link to node " + std::to_string(i)});
      continue;
    }
    seen[static_cast<std::size_t>(i)] = true;
    const TrieNode& n = nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) {
      if (n.target == kNoServer) out.push_back({Kind::nil_leaf, "node " + std::to_string(i)});
      Bound b(std::move(upper));
      if (previous && !bound_less(*previous, b)) {
        out.push_back({Kind::non_monotone,
                       "leaf " + std::to_string(i) + " bound " + render(b) + " after " +
                           render(*previous)});
      }
      previous = std::move(b);
      continue;
    }
    if (n.left < 0 || n.right < 0) {
      out.push_back({Kind::bad_link, "internal node " + std::to_string(i) + " missing a child"});
      continue;
    }
    if (n.position > max_position) {
      out.push_back({Kind::bad_position, "node " + std::to_string(i) + " position " +
                                             std::to_string(n.position)});
    }
    if (n.digit == '\0' || n.digit == kMaxDigit) {
      out.push_back({Kind::bad_digit, "node " + std::to_string(i)});
    }
    if (n.position > upper.size()) {
      out.push_back({Kind::broken_descent, "node " + std::to_string(i) + " position " +
                                               std::to_string(n.position) + " under bound " +
                                               render(Bound(upper))});
      continue;
    }
    std::string cand = upper.substr(0, n.position);
    cand.push_back(n.digit);
    stack.emplace_back(n.right, std::move(upper));
    stack.emplace_back(n.left, std::move(cand));
  }
  if (previous && !previous->is_top()) {
    out.push_back({Kind::last_not_top, "last bound " + render(*previous)});
  }
  return out;
}

}  // namespace thstar

#endif  // THSTAR_TRIE_HPP
