#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kfsum {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (CLI exit status 2).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A request exceeds a table, sieve or memory capacity (CLI exit status 3).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A sweep exceeds its configured work budget (CLI exit status 3).
class BudgetError : public CapacityError {
 public:
  using CapacityError::CapacityError;
};

/// A self-consistency check failed; indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

class NotInvertible : public Error {
 public:
  NotInvertible(std::int64_t value, std::uint64_t modulus, std::uint64_t gcd)
      : Error("not invertible: gcd(" + std::to_string(value) + ", " +
              std::to_string(modulus) + ") = " + std::to_string(gcd)),
        gcd_(gcd) {}

  std::uint64_t gcd() const noexcept { return gcd_; }

 private:
  std::uint64_t gcd_;
};

}  // namespace kfsum
