// Copyright (c) 2026 The bimhar Authors. All Rights Reserved
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
#include <vector>

namespace bimhar {

enum class ErrorKind {
  kParse,       // malformed document or record
  kIo,          // unreadable / unwritable file
  kValidation,  // well-formed input violating an invariant
  kDomain,      // runtime condition (unknown task, empty space, ...)
};

/// Base error for the library. Carries a kind so callers (the CLI) can map
/// failures onto exit codes, plus the individual issues when a validator
/// collected more than one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  Error(ErrorKind kind, std::vector<std::string> issues);

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  ErrorKind kind_;
  std::vector<std::string> issues_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error(ErrorKind::kParse, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::kIo, message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error(ErrorKind::kValidation, message) {}
  explicit ValidationError(std::vector<std::string> issues)
      : Error(ErrorKind::kValidation, std::move(issues)) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error(ErrorKind::kDomain, message) {}
};

/// 0 success, 1 validation/domain error, 2 I/O or format error.
int exit_code_for(ErrorKind kind) noexcept;

/// Reads a whole file; throws IoError naming the path on failure.
std::string read_file(const std::string& path);

}  // namespace bimhar
