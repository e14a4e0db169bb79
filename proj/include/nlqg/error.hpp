#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlqg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: violated precondition, inconsistent shapes, out-of-range parameter.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A time integration blew up (norm jump, non-finite values, step underflow).
class NumericalInstability : public Error {
 public:
  NumericalInstability(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// The integrated state left the physical domain (negative density).
class UnphysicalState : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace nlqg
