#include "mee/special.hpp"

#include <gsl/gsl_sf_expint.h>

#include <vector>

namespace mee::special {

double sine_integral(double x) { return gsl_sf_Si(x); }

double sine_integral_complement(double z) { return std::numbers::pi / 2.0 - gsl_sf_Si(z); }

namespace {

// Cubic Hermite table of pi/2 - Si on [0, kTableEnd]; the derivative is
// exactly -sin(z)/z, so only values need the slow evaluation.
constexpr double kTableStep = 1.0 / 256.0;
constexpr double kTableEnd = 256.0;

struct SiTable {
  std::vector<double> value, slope;
  SiTable() {
    const auto count = static_cast<std::size_t>(kTableEnd / kTableStep) + 2;
    value.resize(count);
    slope.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double z = static_cast<double>(i) * kTableStep;
      value[i] = sine_integral_complement(z);
      slope[i] = -sinc(z);
    }
  }
};

const SiTable& si_table() {
  static const SiTable table;
  return table;
}

} // namespace

double sine_integral_complement_fast(double z) {
  if (!(z < kTableEnd)) return sine_integral_complement(z);
  const auto& t = si_table();
  const double u = z / kTableStep;
  const auto i = static_cast<std::size_t>(u);
  const double s = u - static_cast<double>(i);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * t.value[i] + h01 * t.value[i + 1] +
         kTableStep * (h10 * t.slope[i] + h11 * t.slope[i + 1]);
}

double cos_over_square_tail(double a, double X) {
  const double aa = std::abs(a);
  if (aa == 0.0) return 1.0 / X;
  return std::cos(aa * X) / X - aa * sine_integral_complement(aa * X);
}

} // namespace mee::special
