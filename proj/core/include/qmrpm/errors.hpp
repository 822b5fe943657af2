#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qmrpm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad labels, non-monotone chains, kernels off their grid, ...
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A conditional law was requested on an event of probability zero.
class UndefinedConditional : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured budget.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::uint64_t required, std::uint64_t budget)
      : Error(what + " (required " + std::to_string(required) + ", budget " +
              std::to_string(budget) + ")"),
        required_(required),
        budget_(budget) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

/// An identity that must hold by construction did not. Indicates a bug.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmrpm
