#pragma once

#include <cmath>
#include <numbers>

namespace mee::special {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

inline double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Sine integral Si(x) = int_0^x sin(t)/t dt.
double sine_integral(double x);

/// pi/2 - Si(z) for z >= 0, absolute accuracy near machine epsilon.
double sine_integral_complement(double z);

/// Tabulated pi/2 - Si(z), absolute error below 1e-12; z >= 0.
double sine_integral_complement_fast(double z);

/// int_X^inf cos(a t) / t^2 dt for X > 0 (exact, via the sine integral).
double cos_over_square_tail(double a, double X);

/// sin(x)/x with the removable singularity filled in.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

} // namespace mee::special
