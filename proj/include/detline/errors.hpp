#pragma once

#include <stdexcept>

namespace detline {

// Malformed problem definitions, bad parameters, dimension mismatches.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A well-formed request that cannot be computed: zero-mode conflicts,
// integrator failure, failed precondition checks.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

// L1 has a zero mode where the plain ratio was requested, or L2 has one.
class ZeroModeError : public ComputationError {
 public:
  enum class Operator { Numerator, Denominator };
  ZeroModeError(Operator which, const std::string& what)
      : ComputationError(what), which_(which) {}
  Operator which() const noexcept { return which_; }

 private:
  Operator which_;
};

class SelfAdjointnessError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace detline
