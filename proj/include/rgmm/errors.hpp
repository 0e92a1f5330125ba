#pragma once

#include <stdexcept>
#include <string>

namespace rgmm {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (shape mismatch, bad scalar).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A point failed the owning manifold's membership test.
class InvalidPoint : public Error {
 public:
  using Error::Error;
};

/// Problem data rejected at construction (asymmetric matrix, bad sizes).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Configuration or file-format error.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rgmm
