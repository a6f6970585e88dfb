#include "mee/kernel_objective.hpp"
#include "mee/rng.hpp"
#include "mee/simd/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace mee;

namespace {

// Independent reference: plain double loop with std::exp.
void naive(const std::vector<double>& t, const std::vector<double>& s, double c,
           std::vector<double>& k, std::vector<double>& w) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    k[i] = w[i] = 0.0;
    for (double sj : s) {
      const double d = t[i] - sj;
      const double e = std::exp(-d * d * c);
      k[i] += e;
      w[i] += d * e;
    }
  }
}

std::vector<double> draw(std::size_t n, double scale, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

} // namespace

TEST(SimdKernels, ScalarMatchesNaiveLoop) {
  Rng rng{7};
  const auto t = draw(37, 2.0, rng), s = draw(53, 2.0, rng);
  std::vector<double> k(37), w(37), k0(37), w0(37);
  simd::gauss_row_sums(simd::Isa::scalar, t, s, 1.3, k, w);
  naive(t, s, 1.3, k0, w0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(k[i], k0[i], 1e-13 * std::abs(k0[i]));
    EXPECT_NEAR(w[i], w0[i], 1e-12 * (std::abs(w0[i]) + k0[i]));
  }
}

TEST(SimdKernels, Avx2MatchesScalar) {
  if (!simd::available(simd::Isa::avx2)) GTEST_SKIP() << "avx2 not available";
  Rng rng{11};
  for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 17u, 256u, 1001u}) {
    for (double c : {1e-4, 0.5, 8.0, 5000.0}) {
      const auto t = draw(n, 3.0, rng), s = draw(n + 2, 3.0, rng);
      std::vector<double> ka(n), wa(n), ks(n), ws(n);
      simd::gauss_row_sums(simd::Isa::avx2, t, s, c, ka, wa);
      simd::gauss_row_sums(simd::Isa::scalar, t, s, c, ks, ws);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(ka[i], ks[i], 1e-13 * ks[i] + 1e-300) << "n=" << n << " c=" << c;
        // The weighted sum cancels; compare against the magnitude scale.
        double scale = 0.0;
        for (double sj : s) scale += std::abs(t[i] - sj) * std::exp(-(t[i] - sj) * (t[i] - sj) * c);
        EXPECT_NEAR(wa[i], ws[i], 1e-13 * scale + 1e-300);
      }
    }
  }
}

TEST(SimdKernels, UnderflowIsExactZero) {
  if (!simd::available(simd::Isa::avx2)) GTEST_SKIP() << "avx2 not available";
  const std::vector<double> t = {0.0}, s = {100.0, -100.0, 1e3, -1e3, 40.0};
  std::vector<double> k(1), w(1);
  simd::gauss_row_sums(simd::Isa::avx2, t, s, 1.0, k, w);
  EXPECT_EQ(k[0], 0.0);
  EXPECT_EQ(w[0], 0.0);
}

TEST(SimdKernels, WeightedSumOptional) {
  const std::vector<double> t = {0.0, 1.0}, s = {0.5};
  std::vector<double> k(2);
  for (auto isa : {simd::Isa::scalar, simd::Isa::avx2}) {
    if (!simd::available(isa)) continue;
    simd::gauss_row_sums(isa, t, s, 0.5, k, {});
    EXPECT_NEAR(k[0], std::exp(-0.125), 1e-15);
    EXPECT_NEAR(k[1], std::exp(-0.125), 1e-15);
  }
}

TEST(SimdKernels, ObjectiveAgreesAcrossVariants) {
  if (!simd::available(simd::Isa::avx2)) GTEST_SKIP() << "avx2 not available";
  Rng rng{3};
  const auto e = draw(3000, 1.0, rng);
  const auto prev = simd::active();
  simd::set_active(simd::Isa::scalar);
  const double a = empirical_info_error(e, 0.3);
  simd::set_active(simd::Isa::avx2);
  const double b = empirical_info_error(e, 0.3);
  simd::set_active(prev);
  EXPECT_NEAR(a, b, 1e-13 * std::abs(a));
}

TEST(SimdKernels, NamesAndFallback) {
  EXPECT_EQ(simd::name(simd::Isa::scalar), "scalar");
  EXPECT_EQ(simd::name(simd::Isa::avx2), "avx2");
  EXPECT_TRUE(simd::available(simd::Isa::scalar));
  EXPECT_TRUE(simd::available(simd::best_available()));
}
