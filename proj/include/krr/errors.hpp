#pragma once

#include <stdexcept>
#include <string>

namespace krr {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: shape mismatch, non-finite values, out-of-range parameters.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to meet its tolerance or iteration budget.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The data make the requested problem ill-posed (e.g. zero targets).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Raised during an experiment run when too many trials fail.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

/// Sphere solver hard case: the secular function stays below its target on
/// the whole search interval because the weight at the leftmost pole
/// vanishes. Carries the boundary multiplier and a residual certificate
/// instead of a fabricated solution.
class HardCaseError : public Error {
 public:
  HardCaseError(const std::string& msg, double boundary_mu, double sup_value,
                double target)
      : Error(msg),
        boundary_mu_(boundary_mu),
        sup_value_(sup_value),
        target_(target) {}

  /// Multiplier at the left edge of the pole (best boundary value).
  double boundary_mu() const { return boundary_mu_; }
  /// Supremum of the secular function on the search interval.
  double sup_value() const { return sup_value_; }
  /// Target value the secular function failed to reach.
  double target() const { return target_; }

 private:
  double boundary_mu_;
  double sup_value_;
  double target_;
};

}  // namespace krr
