#pragma once

#include <stdexcept>
#include <string>

namespace flownet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad indices, dimension mismatches, non-finite data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A linear system has no solution within tolerance.
class InconsistentSystemError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be invertible is numerically singular.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Steady-state inputs are not strictly inside the saturation boxes.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Explicit gains violate the sufficient gain inequalities.
class GainBoundError : public Error {
 public:
  using Error::Error;
};

/// The integrated state became non-finite.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double last_finite_time)
      : Error(what), last_finite_time_(last_finite_time) {}

  double last_finite_time() const { return last_finite_time_; }

 private:
  double last_finite_time_;
};

}  // namespace flownet
