#pragma once

#include <stdexcept>
#include <string>

namespace lossq {

/// Invalid input: a parameter outside the domain of the quantity requested.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation could not produce a trustworthy number.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A forward recurrence produced a nonpositive or non-finite value.
class InstabilityError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The root finder was handed an interval without a sign change.
class BracketError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A closed form has a vanishing denominator at the requested parameters.
class SingularityError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A truncated series or quadrature could not certify the requested tolerance.
class ToleranceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace lossq
