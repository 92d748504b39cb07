#pragma once

#include <stdexcept>
#include <string>

namespace bregman {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition on the arguments does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be nonsingular is (numerically) singular.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double singular_value)
      : Error(what), singular_value_(singular_value) {}
  double singular_value() const noexcept { return singular_value_; }

 private:
  double singular_value_;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Iterates blew up, typically from a step size violating kappa*alpha*||X*X|| < 2.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Query outside the computed domain of a path.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

}  // namespace bregman
