#pragma once

#include <stdexcept>
#include <string>

namespace sensing {

// Raised when an iterative numerical routine cannot reach its tolerance.
// Carries the partial result and the residual error bound at abort time.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& where, double partial_value, double error_bound)
      : std::runtime_error(where + ": did not converge (partial value " +
                           std::to_string(partial_value) + ", error bound " +
                           std::to_string(error_bound) + ")"),
        partial_value_(partial_value),
        error_bound_(error_bound) {}

  double partial_value() const { return partial_value_; }
  double error_bound() const { return error_bound_; }

private:
  double partial_value_;
  double error_bound_;
};

// Raised when a requested operating point cannot be reached by any threshold.
class CalibrationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace sensing
