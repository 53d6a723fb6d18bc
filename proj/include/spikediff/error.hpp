// Copyright 2026 The spikediff Authors.
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

namespace spikediff {

// Numeric values double as CLI exit codes where one exists (2, 3, 4).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kConfig = 2,
  kCapacity = 3,
  kNumerical = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::kConfig, what) {}
};

class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, double required)
      : Error(ErrorCode::kCapacity, what), required_(required) {}
  double required() const noexcept { return required_; }

 private:
  double required_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCode::kNumerical, what) {}
};

// Raised by the eigensolver; carries the best residual it reached.
class SolverFailure : public NumericalError {
 public:
  SolverFailure(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace spikediff
