#pragma once

#include <stdexcept>
#include <string>

namespace kernelguard {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input data (corpus, model file, config values).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition (bad argument ranges).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace kernelguard
