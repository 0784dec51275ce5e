// Copyright 2026 The hybridmot Authors.
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

#ifndef HYBRIDMOT_ERROR_HPP_
#define HYBRIDMOT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hybridmot {

// Broad failure classes. The numeric values double as CLI exit codes and as
// the status codes of the C API.
enum class ErrorKind {
  kIo = 1,
  kFormat = 2,
  kInternal = 3,
  kInvalidArgument = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorKind::kFormat, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

// Numerical or structural failures inside an algorithm. Callers that can
// recover (RANSAC fallback, coasting) catch these specifically.
class AlgorithmError : public Error {
 public:
  explicit AlgorithmError(const std::string& what)
      : Error(ErrorKind::kInternal, what) {}
};

class SamplingOutOfBounds : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class DegenerateSample : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class NotEnoughPoints : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class NoConsensus : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class SingularInnovation : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

class UndefinedMetric : public AlgorithmError {
 public:
  using AlgorithmError::AlgorithmError;
};

}  // namespace hybridmot

#endif  // HYBRIDMOT_ERROR_HPP_
