#pragma once

#include <stdexcept>
#include <string>

namespace adaprod {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed inputs: dimension mismatches, empty constructions.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Violated numeric preconditions: losses out of range, probability mass
/// that does not sum to the required total, requests exceeding the pool.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine failed to converge; carries the final residual.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

/// Bad run configuration (rejected before any work starts).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace adaprod
