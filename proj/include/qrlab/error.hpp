#pragma once

#include <stdexcept>
#include <string>

namespace qrlab {

/// Root of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: non-Hermitian matrix, dimension
/// mismatch, radius <= 0, parameter out of range.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A state was evaluated outside the extent of a section.
class ExtentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Two sections have disjoint extents, so their combination is the empty section.
class EmptySectionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Failure of a numerical procedure (eigensolver, sampler, integrator).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A whitelisted function was applied outside its domain (sqrt+ of a negative).
class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace qrlab
