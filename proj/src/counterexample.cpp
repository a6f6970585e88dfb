#include "mee/counterexample.hpp"

#include "mee/errors.hpp"
#include "mee/oracle.hpp"
#include "mee/special.hpp"

#include <cmath>
#include <numbers>

namespace mee {

double CounterexampleDecomposition::R() const { return -std::log(-V_total); }

CounterexampleDecomposition cx_decompose(double f1, double f2, double M) {
  if (!std::isfinite(f1) || !std::isfinite(f2) || std::abs(f1) > M || std::abs(f2) > M)
    throw InvalidHypothesis("cx_decompose: values must satisfy |f| <= " + std::to_string(M));
  CounterexampleDecomposition d;
  d.V11 = -0.25;
  d.V22 = -0.125;
  d.t = f1 - f2;
  const double fl = std::floor(d.t);
  d.k = static_cast<long long>(fl);
  d.b_frac = d.t - fl;
  if (d.k == 1 || d.k == -1) d.V12 = 0.25 * (d.b_frac - 1.0);
  else if (d.k == 0 || d.k == -2) d.V12 = -0.25 * d.b_frac;
  else d.V12 = 0.0;
  d.V_total = d.V11 + d.V22 + d.V12;
  return d;
}

namespace {

struct PieceMoments {
  double mean[2] = {0.0, 0.0};
  double spread[2] = {0.0, 0.0};  // int_{X_j} (f - m_j)^2 d rho
};

PieceMoments piece_moments(const RegressionModel& model, const Hypothesis& f) {
  const auto& pieces = model.marginal.pieces();
  if (pieces.size() != 2) throw InvalidModel("counterexample operations need a two-interval marginal");
  PieceMoments pm;
  const auto nodes = model.marginal.nodes(kMarginalNodes);
  const std::size_t per = nodes.size() / 2;
  for (int j = 0; j < 2; ++j) {
    double mass = 0.0, s = 0.0;
    for (std::size_t k = j * per; k < (j + 1) * per; ++k) {
      mass += nodes[k].w;
      s += nodes[k].w * f(nodes[k].x);
    }
    pm.mean[j] = s / mass;
    double v = 0.0;
    for (std::size_t k = j * per; k < (j + 1) * per; ++k) {
      const double r = f(nodes[k].x) - pm.mean[j];
      v += nodes[k].w * r * r;
    }
    pm.spread[j] = v;
  }
  return pm;
}

} // namespace

double cx_minimizer_distance_sq(const RegressionModel& model, const Hypothesis& f) {
  const auto pm = piece_moments(model, f);
  const double g = std::abs(pm.mean[0] - pm.mean[1]) - 1.0;
  return pm.spread[0] + pm.spread[1] + 0.5 * g * g;
}

double cx_minimizer_distance(const RegressionModel& model, const Hypothesis& f) {
  return std::sqrt(cx_minimizer_distance_sq(model, f));
}

CxBoundTerms cx_bound_terms(const RegressionModel& model, const Hypothesis& f) {
  const auto pm = piece_moments(model, f);
  const double g = std::abs(pm.mean[0] - pm.mean[1]) - 1.0;
  return {g * g, pm.spread[0], pm.spread[1]};
}

double cx_bound_constant(double M) {
  return 1.0 / (400.0 * std::numbers::pi * std::numbers::pi * M * M * M);
}

double cx_fourier_identity_check(std::span<const double> xi_grid, int L) {
  if (L < 1) throw InvalidInput("cx_fourier_identity_check: L must be >= 1");
  double worst = 0.0;
  for (double xi : xi_grid) {
    double s = 0.0;
    for (int l = -L; l <= L; ++l) {
      const double v = special::sinc(0.5 * (xi + 2.0 * l * std::numbers::pi));
      s += v * v;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

} // namespace mee
