#pragma once

#include <stdexcept>
#include <string>

namespace rpm {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data: unreadable files, ragged rows, schema mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rpm
