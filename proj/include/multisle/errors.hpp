#pragma once

#include <stdexcept>
#include <string>

namespace multisle {

// Thrown when a quadrature or extrapolation cannot reach the requested
// tolerance.  Carries the best value obtained and its error estimate so
// callers can decide whether to accept it anyway.
class NumericalError : public std::runtime_error {
  public:
    NumericalError(const std::string& what, double best_value, double err_est)
        : std::runtime_error(what), best_value_(best_value), err_est_(err_est) {}

    double best_value() const { return best_value_; }
    double err_est() const { return err_est_; }

  private:
    double best_value_;
    double err_est_;
};

} // namespace multisle
