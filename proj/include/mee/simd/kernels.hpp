#pragma once

#include <span>
#include <string_view>

namespace mee::simd {

enum class Isa { scalar, avx2 };

std::string_view name(Isa isa);

/// True when the variant is compiled in and the running CPU supports it.
bool available(Isa isa);

/// Widest available variant.
Isa best_available();

/// Variant used by the library. Defaults to best_available(); the MEE_SIMD
/// environment variable ("scalar", "avx2", "auto") overrides it, and
/// set_active() overrides both. Requesting an unavailable variant falls
/// back to scalar.
Isa active();
void set_active(Isa isa);

/// Gaussian row sums over all (target, source) pairs:
///   kernel_sum[i]   = sum_j exp(-(t_i - s_j)^2 * inv_2h2)
///   weighted_sum[i] = sum_j (t_i - s_j) exp(-(t_i - s_j)^2 * inv_2h2)
/// weighted_sum may be empty, in which case it is not computed. Each row is
/// accumulated in a fixed order, so results depend only on the inputs and
/// the variant.
void gauss_row_sums(Isa isa, std::span<const double> targets, std::span<const double> sources,
                    double inv_2h2, std::span<double> kernel_sum,
                    std::span<double> weighted_sum);

inline void gauss_row_sums(std::span<const double> targets, std::span<const double> sources,
                           double inv_2h2, std::span<double> kernel_sum,
                           std::span<double> weighted_sum) {
  gauss_row_sums(active(), targets, sources, inv_2h2, kernel_sum, weighted_sum);
}

namespace scalar {
void gauss_row_sums(std::span<const double> targets, std::span<const double> sources,
                    double inv_2h2, std::span<double> kernel_sum,
                    std::span<double> weighted_sum);
}

namespace avx2 {
void gauss_row_sums(std::span<const double> targets, std::span<const double> sources,
                    double inv_2h2, std::span<double> kernel_sum,
                    std::span<double> weighted_sum);
}

} // namespace mee::simd
