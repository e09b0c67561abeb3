// SPDX-License-Identifier: Apache-2.0
//
// mmwgen - generative millimeter wave channel models
// Copyright (C) 2026 The mmwgen authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMWGEN_ERROR_HPP
#define MMWGEN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mmwgen {

enum class ErrorKind {
  dimension,      // vector/matrix length mismatch
  domain,         // argument outside the valid domain (zero distance, bad fraction, ...)
  non_finite,     // NaN or Inf encountered
  parse,          // malformed input file
  version,        // incompatible model file
  io,             // file could not be opened or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

inline std::string dimension_message(const std::string& where, std::size_t expected, std::size_t actual) {
  return where + ": expected length " + std::to_string(expected) + ", got " + std::to_string(actual);
}

}  // namespace mmwgen

#endif
