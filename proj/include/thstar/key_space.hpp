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

#ifndef THSTAR_KEY_SPACE_HPP
#define THSTAR_KEY_SPACE_HPP

// Ordered digit alphabet, keys, boundary strings and intervals.
//
// A Bound is a digit string read as if followed by infinitely many maximal
// digits. The empty Bound is therefore TOP, above every key. BOTTOM is a
// distinguished value below every key. Keys never contain the two sentinel
// digits, so TOP and BOTTOM strictly bracket the key space.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "thstar/errors.hpp"

namespace thstar {

inline constexpr char kMinDigit = '_';
inline constexpr char kMaxDigit = '|';

/// Position of a digit in the total order: '_' first, '|' last, every other
/// byte by code point in between.
constexpr int digit_rank(char c) noexcept {
  if (c == kMinDigit) return 0;
  if (c == kMaxDigit) return 257;
  return static_cast<unsigned char>(c) + 1;
}

constexpr bool is_sentinel(char c) noexcept { return c == kMinDigit || c == kMaxDigit; }

/// The non-sentinel digits a file's keys may use.
class Alphabet {
 public:
  /// Printable ASCII 0x21..0x7A without '_'.
  Alphabet() {
    std::string digits;
    for (char c = 0x21; c <= 0x7A; ++c) {
      if (!is_sentinel(c)) digits.push_back(c);
    }
    assign(digits);
  }

  explicit Alphabet(std::string_view digits) { assign(digits); }

  static Alphabet range(char first, char last) {
    std::string digits;
    for (int c = static_cast<unsigned char>(first); c <= static_cast<unsigned char>(last); ++c) {
      digits.push_back(static_cast<char>(c));
    }
    return Alphabet(digits);
  }

  bool contains(char c) const noexcept { return member_[static_cast<unsigned char>(c)]; }
  const std::string& digits() const noexcept { return digits_; }
  std::size_t size() const noexcept { return digits_.size(); }
  char smallest() const noexcept { return digits_.front(); }
  char largest() const noexcept { return digits_.back(); }

  /// Smallest alphabet digit ranked above `c` (which may be a sentinel).
  std::optional<char> next_after(char c) const noexcept {
    auto it = std::upper_bound(digits_.begin(), digits_.end(), c, [](char a, char b) {
      return digit_rank(a) < digit_rank(b);
    });
    if (it == digits_.end()) return std::nullopt;
    return *it;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) noexcept {
    return a.digits_ == b.digits_;
  }

 private:
  void assign(std::string_view digits) {
    std::string sorted(digits);
    std::sort(sorted.begin(), sorted.end(),
              [](char a, char b) { return digit_rank(a) < digit_rank(b); });
    if (sorted.empty()) throw ContractViolation("alphabet must not be empty");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ContractViolation("alphabet contains a repeated digit");
    }
    for (char c : sorted) {
      if (is_sentinel(c)) throw ContractViolation("alphabet must not contain '_' or '|'");
      member_[static_cast<unsigned char>(c)] = true;
    }
    digits_ = std::move(sorted);
  }

  std::string digits_;
  std::array<bool, 256> member_{};
};

/// A non-empty digit sequence free of sentinels. Construction does not
/// validate; use KeySpace::make_key for checked keys.
class Key {
 public:
  Key() = default;
  explicit Key(std::string digits) : digits_(std::move(digits)) {}

  const std::string& str() const noexcept { return digits_; }
  std::size_t size() const noexcept { return digits_.size(); }
  char operator[](std::size_t i) const noexcept { return digits_[i]; }

  // Keys never hold sentinels, so byte order equals digit order.
  friend bool operator==(const Key&, const Key&) = default;
  friend std::strong_ordering operator<=>(const Key& a, const Key& b) noexcept {
    return a.digits_.compare(b.digits_) <=> 0;
  }

 private:
  std::string digits_;
};

class Bound {
 public:
  /// TOP.
  Bound() = default;
  explicit Bound(std::string digits) : digits_(std::move(digits)) {}

  static Bound top() { return Bound(); }
  static Bound bottom() {
    Bound b;
    b.bottom_ = true;
    return b;
  }

  bool is_bottom() const noexcept { return bottom_; }
  bool is_top() const noexcept { return !bottom_ && digits_.empty(); }
  const std::string& digits() const noexcept { return digits_; }

  friend bool operator==(const Bound&, const Bound&) = default;

 private:
  std::string digits_;
  bool bottom_ = false;
};

enum class KeySide { le, gt };

namespace detail {

// Compares `key` against `prefix` followed by the single digit `last` (if
// non-zero), padded with maximal digits.
inline KeySide key_side(std::string_view key, std::string_view prefix, char last = '\0') noexcept {
  const std::size_t n = std::min(key.size(), prefix.size());
  for (std::size_t j = 0; j < n; ++j) {
    if (key[j] != prefix[j]) {
      return digit_rank(key[j]) > digit_rank(prefix[j]) ? KeySide::gt : KeySide::le;
    }
  }
  if (last == '\0' || key.size() <= prefix.size()) return KeySide::le;
  return digit_rank(key[prefix.size()]) > digit_rank(last) ? KeySide::gt : KeySide::le;
}

}  // namespace detail

/// Side of the cut `c` on which `k` falls.
inline KeySide bound_compare(const Key& k, const Bound& c) noexcept {
  if (c.is_bottom()) return KeySide::gt;
  return detail::key_side(k.str(), c.digits());
}

/// Total order on bounds. A proper prefix is the larger bound.
inline std::strong_ordering bound_order(const Bound& a, const Bound& b) noexcept {
  if (a.is_bottom() || b.is_bottom()) {
    return static_cast<int>(!a.is_bottom()) <=> static_cast<int>(!b.is_bottom());
  }
  const std::string& x = a.digits();
  const std::string& y = b.digits();
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t j = 0; j < n; ++j) {
    if (x[j] != y[j]) return digit_rank(x[j]) <=> digit_rank(y[j]);
  }
  return y.size() <=> x.size();
}

inline bool bound_less(const Bound& a, const Bound& b) noexcept { return bound_order(a, b) < 0; }

/// Half-open interval (lower, upper] under max-digit padding.
struct Interval {
  Bound lower = Bound::bottom();
  Bound upper = Bound::top();

  bool contains(const Key& k) const noexcept {
    return bound_compare(k, lower) == KeySide::gt && bound_compare(k, upper) == KeySide::le;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline bool interval_contains(const Interval& iv, const Key& k) noexcept { return iv.contains(k); }

inline Bound common_prefix(const Bound& a, const Bound& b) {
  if (a.is_bottom() || b.is_bottom()) throw ContractViolation("common_prefix of BOTTOM");
  const auto [ia, ib] = std::mismatch(a.digits().begin(), a.digits().end(), b.digits().begin(),
                                      b.digits().end());
  return Bound(std::string(a.digits().begin(), ia));
}

/// "_" for BOTTOM, "|" for TOP, otherwise the raw digits.
inline std::string render(const Bound& b) {
  if (b.is_bottom()) return std::string(1, kMinDigit);
  if (b.is_top()) return std::string(1, kMaxDigit);
  return b.digits();
}

inline Bound parse_bound(std::string_view text) {
  if (text == std::string_view(&kMinDigit, 1)) return Bound::bottom();
  if (text == std::string_view(&kMaxDigit, 1)) return Bound::top();
  if (text.empty()) throw ContractViolation("empty bound text");
  return Bound(std::string(text));
}

/// Alphabet and maximum key length of one file.
struct KeySpace {
  Alphabet alphabet;
  std::size_t max_key_length = 32;

  bool is_valid_key(std::string_view digits) const noexcept {
    if (digits.empty() || digits.size() > max_key_length) return false;
    return std::all_of(digits.begin(), digits.end(), [&](char c) { return alphabet.contains(c); });
  }

  Key make_key(std::string digits) const {
    if (!is_valid_key(digits)) throw InvalidKey("invalid key '" + digits + "'");
    return Key(std::move(digits));
  }

  /// Smallest valid key strictly above `b`, or nothing when `b` already
  /// covers every key.
  std::optional<Key> first_key_above(const Bound& b) const {
    if (b.is_bottom()) return Key(std::string(1, alphabet.smallest()));
    const std::string& d = b.digits();
    for (std::size_t j = std::min(d.size(), max_key_length); j-- > 0;) {
      if (auto next = alphabet.next_after(d[j])) {
        return Key(d.substr(0, j) + *next);
      }
    }
    return std::nullopt;
  }
};

}  // namespace thstar

#endif  // THSTAR_KEY_SPACE_HPP
