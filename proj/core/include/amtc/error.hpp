// Copyright 2026 The AMTC Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace amtc {

// Input errors are the caller's fault (bad file, bad shape, bad config);
// computation errors are raised when a well-formed request cannot be solved.
enum class ErrorKind { kInput, kComputation };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  // Short machine-readable tag, e.g. "empty_input" or "dimension_mismatch".
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

class InputError : public Error {
 public:
  InputError(std::string code, const std::string& message)
      : Error(ErrorKind::kInput, std::move(code), message) {}
};

class ComputationError : public Error {
 public:
  ComputationError(std::string code, const std::string& message)
      : Error(ErrorKind::kComputation, std::move(code), message) {}
};

}  // namespace amtc
