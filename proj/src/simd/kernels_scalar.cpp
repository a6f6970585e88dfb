#include "mee/simd/kernels.hpp"

#include <cmath>

namespace mee::simd::scalar {

void gauss_row_sums(std::span<const double> targets, std::span<const double> sources,
                    double inv_2h2, std::span<double> kernel_sum,
                    std::span<double> weighted_sum) {
  const bool weighted = !weighted_sum.empty();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double t = targets[i];
    double k = 0.0, w = 0.0;
    for (double s : sources) {
      const double d = t - s;
      const double g = std::exp(-d * d * inv_2h2);
      k += g;
      if (weighted) w += d * g;
    }
    kernel_sum[i] = k;
    if (weighted) weighted_sum[i] = w;
  }
}

} // namespace mee::simd::scalar
