#pragma once

#include <stdexcept>
#include <string>

namespace dagmono {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input (cycles, out-of-range vertices, length
/// mismatches, invalid witnesses, bad parameters).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what) {}
};

/// Exact arithmetic left the representable range.
class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& what) : Error(what) {}
};

/// Quantization needs more distinct values than the target range offers.
class RangeExceeded : public Error {
 public:
  explicit RangeExceeded(const std::string& what) : Error(what) {}
};

/// An adaptive strategy asked for more queries than its budget.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what) : Error(what) {}
};

/// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(what) {}
};

}  // namespace dagmono
