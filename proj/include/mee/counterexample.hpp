#pragma once

#include "mee/hypothesis.hpp"
#include "mee/model.hpp"

#include <span>

namespace mee {

/// Closed-form pieces of V for f = f1 on [0, 1/2], f2 on [1, 3/2] in the
/// two-interval model.
struct CounterexampleDecomposition {
  double V11 = 0.0, V22 = 0.0, V12 = 0.0, V_total = 0.0;
  double t = 0.0;       // f1 - f2
  long long k = 0;      // floor(t)
  double b_frac = 0.0;  // t - k, in [0, 1)
  double R() const;
};

/// Bound used when none is given: the box [-2, 2] covers every minimizer
/// reachable from functions bounded by 1.
inline constexpr double kCxDefaultBound = 2.0;

CounterexampleDecomposition cx_decompose(double f1, double f2, double M = kCxDefaultBound);

/// Squared L2 distance from f to the nearest-constructed minimizer
/// (f1 = mean of f on the first interval, f2 = f1 +- 1):
///   ||f - m1||^2_{X1} + ||f - m2||^2_{X2} + (|m1 - m2| - 1)^2 / 2.
/// Means and norms are taken against the marginal.
double cx_minimizer_distance_sq(const RegressionModel& model, const Hypothesis& f);
double cx_minimizer_distance(const RegressionModel& model, const Hypothesis& f);

/// The three terms of the lower bound on V(f) - V*:
/// (|m1 - m2| - 1)^2, ||f - m1||^2_{X1}, ||f - m2||^2_{X2}.
struct CxBoundTerms {
  double gap_sq = 0.0, spread1 = 0.0, spread2 = 0.0;
  double sum() const { return gap_sq + spread1 + spread2; }
};
CxBoundTerms cx_bound_terms(const RegressionModel& model, const Hypothesis& f);

/// 1 / (400 pi^2 M^3).
double cx_bound_constant(double M);

/// sup over xi_grid of | sum_{l=-L}^{L} |2 sin((xi + 2 l pi)/2) / (xi + 2 l pi)|^2 - 1 |.
double cx_fourier_identity_check(std::span<const double> xi_grid, int L);

} // namespace mee
