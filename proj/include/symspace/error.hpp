#pragma once

#include <stdexcept>
#include <string>

namespace symspace {

/// Argument outside the mathematical domain of an operation (t <= 0, u <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input violates a documented precondition (e.g. a function that must be decreasing).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A structural invariant of a user-supplied object does not hold (non-convex Orlicz table, ...).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Iterative solver stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_estimate, double last_residual)
      : std::runtime_error(what), last_estimate_(last_estimate), last_residual_(last_residual) {}

  double last_estimate() const noexcept { return last_estimate_; }
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_estimate_;
  double last_residual_;
};

/// Requested computation exceeds the dense-size budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed command-line input or function specification.
class UsageError : public std::invalid_argument {
 public:
  UsageError(const std::string& what, std::size_t position = 0)
      : std::invalid_argument(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace symspace
