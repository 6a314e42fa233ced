/*
 * Copyright 2026 The onevar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace onevar {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::vector<std::string> expected, const std::string& found)
      : Error(make_message(position, expected, found)),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string make_message(std::size_t position, const std::vector<std::string>& expected,
                                  const std::string& found) {
    std::string msg = "syntax error at position " + std::to_string(position) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ", found " + found;
    return msg;
  }

  std::size_t position_;
  std::vector<std::string> expected_;
};

/// A path formula where a state formula is required, or a formula outside
/// the fragment an operation accepts.
class SortError : public Error {
 public:
  using Error::Error;
};

/// Operation applied to a formula of the wrong logic (e.g. a coalition
/// quantifier handed to a Kripke model checker).
class LogicError : public Error {
 public:
  using Error::Error;
};

/// Ill-formed model: non-serial relation, undefined transition, bad index.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// An enumeration was cut off before it finished.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace onevar
