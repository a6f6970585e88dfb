#include "mee/errors.hpp"
#include "mee/noise_models.hpp"
#include "mee/quadrature.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

using namespace mee;

namespace {

std::vector<NoisePtr> laws() {
  return {
      std::make_shared<GaussianNoise>(0.7),
      std::make_shared<StableNoise>(1.0, 1.0),
      std::make_shared<StableNoise>(0.8, 1.5),
      std::make_shared<StableNoise>(1.0, 0.8),
      std::make_shared<LinnikNoise>(1.0, 2.0),
      std::make_shared<LinnikNoise>(0.6, 1.5),
      StepNoise::uniform(0.5),
      StepNoise::shell(0.5, 1.5),
  };
}

double mass(const NoiseDensity& law, double lo, double hi) {
  std::vector<double> bps = law.breakpoints();
  auto pts = quad::make_partition(lo, hi, bps);
  return quad::integrate_partitioned([&](double e) { return law.pdf(e); }, pts, {1e-11, 0.0, 4'000'000})
      .value;
}

} // namespace

TEST(NoiseModels, DensitiesIntegrateToOne) {
  for (const auto& law : laws()) {
    const double R = std::min(law->tail_radius(1e-9), 40.0);
    // Heavy tails: add the tail mass the cdf says lies beyond R.
    const double tails = 2.0 * (1.0 - law->cdf(R));
    EXPECT_NEAR(mass(*law, -R, R) + tails, 1.0, 1e-6) << law->id();
  }
}

TEST(NoiseModels, CdfIsIntegralOfPdf) {
  for (const auto& law : laws()) {
    for (double a : {-0.9, 0.2, 1.1}) {
      const double b = a + 0.6;
      EXPECT_NEAR(law->cdf(b) - law->cdf(a), mass(*law, a, b), 1e-8) << law->id() << " a=" << a;
    }
  }
}

TEST(NoiseModels, SamplersPassKolmogorovSmirnov) {
  const std::size_t n = 20000;
  const double crit = 1.95 / std::sqrt(static_cast<double>(n));  // alpha = 0.001
  for (const auto& law : laws()) {
    Rng rng{99, std::hash<std::string>{}(law->id())};
    std::vector<double> s(n);
    for (auto& v : s) v = law->sample(rng);
    std::sort(s.begin(), s.end());
    double D = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double F = law->cdf(s[i]);
      D = std::max({D, std::abs(F - static_cast<double>(i) / n), std::abs(F - static_cast<double>(i + 1) / n)});
    }
    EXPECT_LT(D, crit) << law->id();
  }
}

TEST(NoiseModels, StablePdfMatchesDirectInversion) {
  // p(x) = (1/pi) int_0^T exp(-t^alpha) cos(x t) dt, T past the decay.
  for (double a : {0.8, 1.2, 1.5}) {
    const double T = std::pow(45.0, 1.0 / a);
    for (double x : {1e-5, 0.5, 10.0, 100.0}) {
      std::vector<double> pts{0.0};
      const double step = std::min(std::numbers::pi / x, 0.05);
      for (double t = step; t < T; t += step) pts.push_back(t);
      pts.push_back(T);
      const double want = quad::integrate_partitioned(
                              [&](double t) { return std::exp(-std::pow(t, a)) * std::cos(x * t); }, pts,
                              {1e-15, 1e-13, 40'000'000})
                              .value /
                          std::numbers::pi;
      EXPECT_NEAR(StableNoise::standard_pdf(a, x), want, 1e-10) << a << " " << x;
    }
  }
}

TEST(NoiseModels, NumericCharacteristicFunctionMatchesClosedForm) {
  for (const auto& law : laws()) {
    // alpha < 1 tails decay too slowly for a quick oscillatory integral.
    const bool slow_tail = law->id().find("alpha=0.8") != std::string::npos;
    for (double xi : {0.0, 0.3, 1.7, 4.0}) {
      if (slow_tail && xi != 0.0) continue;
      const auto closed = law->char_fn_closed(xi);
      ASSERT_TRUE(closed.has_value()) << law->id();
      const auto num = law->char_fn_numeric(xi);
      const double tol = law->heavy_tailed() ? 2e-5 : 1e-8;
      EXPECT_NEAR(num.real(), closed->real(), tol) << law->id() << " xi=" << xi;
      EXPECT_NEAR(num.imag(), closed->imag(), tol) << law->id() << " xi=" << xi;
    }
  }
}

TEST(NoiseModels, SpecialCasesCoincide) {
  // alpha = 2 stable is N(0, 2 gamma^2); alpha = 2 Linnik is Laplace.
  StableNoise st(0.5, 2.0);
  GaussianNoise g(0.5 * std::numbers::sqrt2);
  LinnikNoise ln(0.8, 2.0);
  for (double e : {0.0, 0.4, 1.3, 3.0}) {
    EXPECT_NEAR(st.pdf(e), g.pdf(e), 1e-12);
    EXPECT_NEAR(ln.pdf(e), std::exp(-std::abs(e) / 0.8) / 1.6, 1e-12);
  }
  StableNoise cauchy(1.2, 1.0);
  for (double e : {0.0, 0.5, 2.0, 40.0})
    EXPECT_NEAR(cauchy.pdf(e), 1.2 / (std::numbers::pi * (1.44 + e * e)), 1e-10);
}

TEST(NoiseModels, ClosedSmoothingMatchesFourierInversion) {
  for (const auto& law : laws()) {
    if (!law->closed_smoothing()) continue;
    for (double h : {0.1, 0.8}) {
      for (double e : {0.0, 0.45, 1.2}) {
        const double base = law->NoiseDensity::smoothed_pdf(e, h);
        EXPECT_NEAR(law->smoothed_pdf(e, h), base, 1e-7) << law->id() << " h=" << h << " e=" << e;
      }
    }
  }
}

TEST(NoiseModels, SquareIntegral) {
  EXPECT_NEAR(GaussianNoise(0.7).square_integral(), 1.0 / (2.0 * std::sqrt(std::numbers::pi) * 0.7), 1e-12);
  EXPECT_NEAR(LinnikNoise(0.6, 2.0).square_integral(), 1.0 / (4.0 * 0.6), 1e-12);
  EXPECT_NEAR(StepNoise::uniform(0.5)->square_integral(), 1.0, 1e-15);
  EXPECT_NEAR(StepNoise::shell(0.5, 1.5)->square_integral(), 0.5, 1e-15);
}

TEST(NoiseModels, StepValidation) {
  EXPECT_THROW(StepNoise("bad", {{0.0, 1.0, 0.5}}), InvalidModel);
  StepNoise skew("skew", {{-1.0, 0.0, 0.25}, {0.0, 1.0, 0.75}});
  EXPECT_FALSE(skew.symmetric());
  EXPECT_TRUE(StepNoise::shell(0.5, 1.5)->symmetric());
  EXPECT_EQ(StepNoise::uniform(0.5)->support_bound().value(), 0.5);
  // Closed boxes: the endpoint carries the box height.
  EXPECT_EQ(StepNoise::uniform(0.5)->pdf(0.5), 1.0);
  EXPECT_THROW(GaussianNoise(0.0), InvalidModel);
  EXPECT_THROW(StableNoise(1.0, 2.5), InvalidModel);
  EXPECT_THROW(LinnikNoise(1.0, 0.9), InvalidModel);
}

TEST(NoiseModels, FamilyLookup) {
  auto fam = NoiseFamily::piecewise({{0.0, 0.5, StepNoise::uniform(0.5)}, {1.0, 1.5, StepNoise::shell(0.5, 1.5)}});
  EXPECT_FALSE(fam.is_homoskedastic());
  EXPECT_EQ(density_at(fam, 0.2, 0.25), 1.0);
  EXPECT_EQ(density_at(fam, 0.2, 1.25), 0.0);
  EXPECT_EQ(density_at(fam, 1.0, 1.25), 0.5);
  EXPECT_THROW(fam.at(0.75), InvalidInput);
  EXPECT_TRUE(fam.symmetric());
  EXPECT_EQ(fam.support_bound().value(), 1.5);
  EXPECT_TRUE(fam.all_step());
}

TEST(NoiseModels, P1EvidenceForGaussianAndFailures) {
  std::vector<double> xi, xs = {0.0, 0.5, 1.0};
  for (int i = -40; i <= 40; ++i) xi.push_back(0.25 * i);
  auto g = NoiseFamily::homoskedastic(std::make_shared<GaussianNoise>(1.0));
  auto ev = check_p1(g, 1.0, xi, xs);
  EXPECT_TRUE(ev.ok) << ev.reason;
  EXPECT_NEAR(ev.C0, std::exp(-0.5), 1e-12);

  // Bimodal shell: not unimodal.
  auto shell = NoiseFamily::homoskedastic(StepNoise::shell(0.5, 1.5));
  auto bad = check_p1(shell, 1.0, xi, xs);
  EXPECT_FALSE(bad.ok);
  EXPECT_TRUE(bad.witness_e.has_value() || bad.witness_xi.has_value());

  // Uniform: characteristic function sin(a xi)/(a xi) turns negative.
  auto uni = NoiseFamily::homoskedastic(StepNoise::uniform(0.5));
  auto neg = check_p1(uni, 1.0, xi, xs);
  EXPECT_FALSE(neg.ok);
  ASSERT_TRUE(neg.witness_xi.has_value());
  EXPECT_GT(std::abs(*neg.witness_xi), 2.0 * std::numbers::pi - 1e-9);
}

TEST(NoiseModels, P2EvidenceCompactSymmetric) {
  std::vector<double> xs = {0.0, 0.5, 1.0};
  auto uni = NoiseFamily::homoskedastic(StepNoise::uniform(0.5));
  auto ev = check_p2(uni, xs);
  EXPECT_TRUE(ev.ok) << ev.reason;
  EXPECT_NEAR(ev.support, 0.5, 1e-3);

  auto g = NoiseFamily::homoskedastic(std::make_shared<GaussianNoise>(1.0));
  auto bad = check_p2(g, xs);
  EXPECT_FALSE(bad.ok);
  EXPECT_TRUE(bad.witness_e.has_value());
}
