#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fgps {

/// Raised when an iterative numerical procedure fails to reach its tolerance
/// or produces a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A real number stored as sign * exp(log_abs). Used wherever magnitudes
/// overflow double (high-order cardinal derivatives, error bounds).
struct SignedLog {
  int sign = 0;  // -1, 0 or +1
  double log_abs = -std::numeric_limits<double>::infinity();

  static SignedLog from_value(double v) {
    if (v == 0.0) return {};
    return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
  }

  double value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_abs);
  }

  double log10_abs() const { return log_abs / std::numbers::ln10; }

  SignedLog operator*(const SignedLog& o) const {
    if (sign == 0 || o.sign == 0) return {};
    return {sign * o.sign, log_abs + o.log_abs};
  }
};

}  // namespace fgps
