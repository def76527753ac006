#pragma once

#include <stdexcept>
#include <string>

namespace fracdyn {

/// Argument outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integer order passed where a fractional one is required, or an order
/// the causal history scheme does not support.
class UnsupportedOrderError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The Chetaev gradient of a constraint (or A^2 in Hamilton form) vanished.
class SingularConstraintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial data does not satisfy the constraint.
class ConstraintViolationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A special-function evaluation could not reach its accuracy target.
class AccuracyLossError : public std::runtime_error {
 public:
  AccuracyLossError(const std::string& what, double achieved_bound);
  double achieved_bound() const noexcept { return achieved_bound_; }

 private:
  double achieved_bound_;
};

/// Integration blew up (|state| above threshold or NaN).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double t, std::size_t step);
  double time() const noexcept { return t_; }
  std::size_t step() const noexcept { return step_; }

 private:
  double t_;
  std::size_t step_;
};

}  // namespace fracdyn
