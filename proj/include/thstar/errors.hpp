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

#ifndef THSTAR_ERRORS_HPP
#define THSTAR_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thstar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidKey : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A trie whose shape breaks the descent rule (|B| < position, dangling link,
// or a server that would forward to itself).
class StructuralCorruption : public Error {
 public:
  using Error::Error;
};

class InvalidLocator : public Error {
 public:
  using Error::Error;
};

class SplitBoundViolation : public Error {
 public:
  using Error::Error;
};

class GraftMismatch : public Error {
 public:
  using Error::Error;
};

class AllocationError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class NilRejected : public ParseError {
 public:
  explicit NilRejected(std::size_t offset)
      : ParseError("nil leaf marker rejected", offset) {}
};

}  // namespace thstar

#endif  // THSTAR_ERRORS_HPP
