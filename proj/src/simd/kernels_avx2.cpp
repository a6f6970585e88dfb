// Compiled with -mavx2 -mfma; only reached when the CPU reports both.
#include "mee/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace mee::simd::avx2 {
namespace {

// exp(x) for x <= 0. Cody-Waite reduction x = k ln2 + r, |r| <= ln2/2,
// degree-13 Taylor polynomial (truncation < 1e-17 relative), scale by 2^k.
// Arguments below -708 return exactly 0.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lo_limit = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo_limit);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  // Horner on 1/j! coefficients, highest first.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);        // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));  // 1/12!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));   // 1/11!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));    // 1/10!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^k via exponent bits; k is in [-1022, 0] after the clamp.
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scale = _mm256_castsi256_pd(bits);

  const __m256d result = _mm256_mul_pd(p, scale);
  return _mm256_andnot_pd(underflow, result);
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

} // namespace

void gauss_row_sums(std::span<const double> targets, std::span<const double> sources,
                    double inv_2h2, std::span<double> kernel_sum,
                    std::span<double> weighted_sum) {
  const bool weighted = !weighted_sum.empty();
  const std::size_t n = sources.size();
  const std::size_t n8 = n - n % 8;
  const double* src = sources.data();
  const __m256d neg_scale = _mm256_set1_pd(-inv_2h2);

  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double t = targets[i];
    const __m256d tv = _mm256_set1_pd(t);
    __m256d k0 = _mm256_setzero_pd(), k1 = _mm256_setzero_pd();
    __m256d w0 = _mm256_setzero_pd(), w1 = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n8; j += 8) {
      const __m256d d0 = _mm256_sub_pd(tv, _mm256_loadu_pd(src + j));
      const __m256d d1 = _mm256_sub_pd(tv, _mm256_loadu_pd(src + j + 4));
      const __m256d g0 = exp_nonpositive(_mm256_mul_pd(_mm256_mul_pd(d0, d0), neg_scale));
      const __m256d g1 = exp_nonpositive(_mm256_mul_pd(_mm256_mul_pd(d1, d1), neg_scale));
      k0 = _mm256_add_pd(k0, g0);
      k1 = _mm256_add_pd(k1, g1);
      if (weighted) {
        w0 = _mm256_fmadd_pd(d0, g0, w0);
        w1 = _mm256_fmadd_pd(d1, g1, w1);
      }
    }
    double k = hsum(_mm256_add_pd(k0, k1));
    double w = weighted ? hsum(_mm256_add_pd(w0, w1)) : 0.0;
    for (std::size_t j = n8; j < n; ++j) {
      const double d = t - src[j];
      const double g = std::exp(-d * d * inv_2h2);
      k += g;
      w += d * g;
    }
    kernel_sum[i] = k;
    if (weighted) weighted_sum[i] = w;
  }
}

} // namespace mee::simd::avx2
