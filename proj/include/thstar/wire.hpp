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

#ifndef THSTAR_WIRE_HPP
#define THSTAR_WIRE_HPP

// Request and reply envelopes and their byte encoding.
//
// A message is a sequence of length-prefixed fields, each written as
// `<decimal length>:<bytes>`. The first field tags the message ("Q" request,
// "A" reply). Bounds use their textual rendering, IAM payloads the trie
// serialization.

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "thstar/errors.hpp"
#include "thstar/key_space.hpp"
#include "thstar/trie.hpp"

namespace thstar {

using ClientId = std::uint32_t;

enum class OpKind : std::uint8_t { insert, search, range };
enum class Status : std::uint8_t { ok, duplicate, not_found, error };

inline const char* to_string(OpKind op) noexcept {
  switch (op) {
    case OpKind::insert: return "insert";
    case OpKind::search: return "search";
    case OpKind::range: return "range";
  }
  return "?";
}

inline const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::ok: return "OK";
    case Status::duplicate: return "DUPLICATE";
    case Status::not_found: return "NOT_FOUND";
    case Status::error: return "ERROR";
  }
  return "?";
}

struct RequestEnvelope {
  OpKind op = OpKind::search;
  ClientId client = 0;
  std::uint64_t op_seq = 0;
  Key key;      // the key, or kmin for a range
  Key key_max;  // range only
  // The client's leaf for `key`: (lower, CM_client] and the server it names.
  Interval client_region;
  ServerId image_target = 0;
  std::uint32_t hops = 0;

  const Bound& cm_client() const noexcept { return client_region.upper; }

  friend bool operator==(const RequestEnvelope&, const RequestEnvelope&) = default;
};

/// Image adjustment: a sub-trie to graft at the client's leaf for server m,
/// with m_prime the sub-trie's last leaf.
struct Iam {
  std::string payload;
  ServerId m = 0;
  ServerId m_prime = 0;

  friend bool operator==(const Iam&, const Iam&) = default;
};

struct RangeSlice {
  std::vector<Key> keys;
  Bound cm_server;
  bool stop = true;
  std::optional<ServerId> next_hint;

  friend bool operator==(const RangeSlice&, const RangeSlice&) = default;
};

struct ReplyEnvelope {
  Status status = Status::ok;
  ServerId server = 0;
  ClientId client = 0;
  std::uint64_t op_seq = 0;
  std::uint32_t hops = 0;
  std::optional<Iam> iam;
  std::optional<RangeSlice> range;
  std::string error;

  friend bool operator==(const ReplyEnvelope&, const ReplyEnvelope&) = default;
};

using Message = std::variant<RequestEnvelope, ReplyEnvelope>;

namespace detail {

class FieldWriter {
 public:
  FieldWriter& put(std::string_view field) {
    out_ += std::to_string(field.size());
    out_ += ':';
    out_ += field;
    return *this;
  }
  FieldWriter& put(std::uint64_t v) { return put(std::string_view(std::to_string(v))); }
  FieldWriter& put(const Bound& b) { return put(std::string_view(render(b))); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class FieldReader {
 public:
  explicit FieldReader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view next() {
    const std::size_t start = pos_;
    std::size_t len = 0;
    auto [ptr, ec] = std::from_chars(bytes_.data() + pos_, bytes_.data() + bytes_.size(), len);
    if (ec != std::errc() || ptr == bytes_.data() + pos_) throw ParseError("expected field length", start);
    pos_ = static_cast<std::size_t>(ptr - bytes_.data());
    if (pos_ >= bytes_.size() || bytes_[pos_] != ':') throw ParseError("expected ':'", pos_);
    ++pos_;
    if (bytes_.size() - pos_ < len) throw ParseError("field overruns message", start);
    std::string_view field = bytes_.substr(pos_, len);
    pos_ += len;
    return field;
  }

  std::uint64_t number() {
    const std::size_t start = pos_;
    std::string_view f = next();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size()) throw ParseError("expected a number", start);
    return v;
  }

  std::uint32_t small(std::uint64_t limit = 0xFFFFFFFFull) {
    const std::size_t start = pos_;
    const std::uint64_t v = number();
    if (v > limit) throw ParseError("number out of range", start);
    return static_cast<std::uint32_t>(v);
  }

  Bound bound() {
    const std::size_t start = pos_;
    std::string_view f = next();
    if (f.empty()) throw ParseError("empty bound", start);
    return parse_bound(f);
  }

  bool flag() {
    const std::size_t start = pos_;
    std::string_view f = next();
    if (f == "1") return true;
    if (f == "0") return false;
    throw ParseError("expected 0 or 1", start);
  }

  std::size_t offset() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

inline std::string_view op_tag(OpKind op) {
  switch (op) {
    case OpKind::insert: return "I";
    case OpKind::search: return "S";
    case OpKind::range: return "R";
  }
  return "?";
}

inline std::string_view status_tag(Status s) {
  switch (s) {
    case Status::ok: return "OK";
    case Status::duplicate: return "DUP";
    case Status::not_found: return "NF";
    case Status::error: return "ERR";
  }
  return "?";
}

}  // namespace detail

inline std::string encode(const RequestEnvelope& r) {
  detail::FieldWriter w;
  w.put("Q")
      .put(detail::op_tag(r.op))
      .put(r.client)
      .put(r.op_seq)
      .put(std::string_view(r.key.str()))
      .put(std::string_view(r.key_max.str()))
      .put(r.client_region.lower)
      .put(r.client_region.upper)
      .put(r.image_target)
      .put(r.hops);
  return w.take();
}

inline std::string encode(const ReplyEnvelope& r) {
  detail::FieldWriter w;
  w.put("A").put(detail::status_tag(r.status)).put(r.server).put(r.client).put(r.op_seq).put(r.hops);
  w.put(r.iam ? "1" : "0");
  if (r.iam) w.put(std::string_view(r.iam->payload)).put(r.iam->m).put(r.iam->m_prime);
  w.put(r.range ? "1" : "0");
  if (r.range) {
    w.put(r.range->keys.size());
    for (const Key& k : r.range->keys) w.put(std::string_view(k.str()));
    w.put(r.range->cm_server).put(r.range->stop ? "1" : "0");
    w.put(r.range->next_hint ? std::to_string(*r.range->next_hint) : std::string("-"));
  }
  w.put(std::string_view(r.error));
  return w.take();
}

inline Message decode(std::string_view bytes) {
  detail::FieldReader in(bytes);
  const std::string_view tag = in.next();
  if (tag == "Q") {
    RequestEnvelope r;
    const std::size_t at = in.offset();
    const std::string_view op = in.next();
    if (op == "I") {
      r.op = OpKind::insert;
    } else if (op == "S") {
      r.op = OpKind::search;
    } else if (op == "R") {
      r.op = OpKind::range;
    } else {
      throw ParseError("unknown op tag", at);
    }
    r.client = in.small();
    r.op_seq = in.number();
    r.key = Key(std::string(in.next()));
    r.key_max = Key(std::string(in.next()));
    r.client_region.lower = in.bound();
    r.client_region.upper = in.bound();
    r.image_target = in.small(kNoServer - 1);
    r.hops = in.small();
    if (!in.done()) throw ParseError("trailing bytes after request", in.offset());
    return r;
  }
  if (tag == "A") {
    ReplyEnvelope r;
    const std::size_t at = in.offset();
    const std::string_view st = in.next();
    if (st == "OK") {
      r.status = Status::ok;
    } else if (st == "DUP") {
      r.status = Status::duplicate;
    } else if (st == "NF") {
      r.status = Status::not_found;
    } else if (st == "ERR") {
      r.status = Status::error;
    } else {
      throw ParseError("unknown status tag", at);
    }
    r.server = in.small(kNoServer - 1);
    r.client = in.small();
    r.op_seq = in.number();
    r.hops = in.small();
    if (in.flag()) {
      Iam iam;
      iam.payload = std::string(in.next());
      iam.m = in.small(kNoServer - 1);
      iam.m_prime = in.small(kNoServer - 1);
      r.iam = std::move(iam);
    }
    if (in.flag()) {
      RangeSlice slice;
      const std::uint64_t count = in.number();
      for (std::uint64_t i = 0; i < count; ++i) slice.keys.emplace_back(std::string(in.next()));
      slice.cm_server = in.bound();
      slice.stop = in.flag();
      const std::size_t hint_at = in.offset();
      const std::string_view hint = in.next();
      if (hint != "-") {
        std::uint32_t v = 0;
        auto [ptr, ec] = std::from_chars(hint.data(), hint.data() + hint.size(), v);
        if (ec != std::errc() || ptr != hint.data() + hint.size() || v >= kNoServer) {
          throw ParseError("bad next-server hint", hint_at);
        }
        slice.next_hint = v;
      }
      r.range = std::move(slice);
    }
    r.error = std::string(in.next());
    if (!in.done()) throw ParseError("trailing bytes after reply", in.offset());
    return r;
  }
  throw ParseError("unknown message tag", 0);
}

}  // namespace thstar

#endif  // THSTAR_WIRE_HPP
