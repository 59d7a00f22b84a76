// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace tsa {

/// Broad failure category. The CLI maps each kind to a distinct exit code.
enum class ErrorKind {
  kConfig,   // usage or configuration violation
  kData,     // malformed / missing / inconsistent input data
  kNumeric,  // NaN or Inf produced during computation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

/// Tensor/parameter dimensions that do not line up.
struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::kNumeric, what) {}
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kData: return "data";
    case ErrorKind::kNumeric: return "numeric";
  }
  return "unknown";
}

}  // namespace tsa
