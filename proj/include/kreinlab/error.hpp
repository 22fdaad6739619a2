#pragma once

#include <stdexcept>
#include <string>

namespace kreinlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the documented range of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A result does not fit in double precision (overflow or underflow).
class FloatingRangeError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class NonSymmetricError : public Error {
 public:
  NonSymmetricError(const std::string& what, double asymmetry)
      : Error(what), asymmetry_(asymmetry) {}
  double asymmetry() const noexcept { return asymmetry_; }

 private:
  double asymmetry_;
};

/// A matrix required to be positive definite is not.
class IndefiniteError : public Error {
 public:
  IndefiniteError(const std::string& what, double smallest_eigenvalue)
      : Error(what), smallest_eigenvalue_(smallest_eigenvalue) {}
  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

/// A linear system is singular or too ill-conditioned to be trusted.
class SingularError : public Error {
 public:
  SingularError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Operands live on different bases (circle grid vs. arc grid, ...).
class BasisMismatchError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A dense computation would exceed its configured size budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kreinlab
