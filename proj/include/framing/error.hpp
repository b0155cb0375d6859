// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace framing {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or vector dimensions do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A label is outside the label set of its task, or a class index is out of range.
class LabelError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values showed up in a gradient or parameter.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Operation called in the wrong state (e.g. backward on an empty or consumed tape).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data. Carries the source location when known.
class DataError : public Error {
 public:
  DataError(const std::string& what) : Error(what) {}
  DataError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what) {}
};

}  // namespace framing
