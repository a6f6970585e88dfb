#pragma once

#include "mee/model.hpp"
#include "mee/noise_models.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace mee {

/// Gauss-Legendre nodes per marginal interval for every x-integral.
inline constexpr std::size_t kMarginalNodes = 64;
/// Panels per interval for the error mixture under step noise, where the
/// x-integrand of p_E has jumps.
inline constexpr std::size_t kStepPanels = 32;

/// V(f) = -int p_E^2, R(f) = -log(-V).
struct EntropyReport {
  double V = 0.0;
  double R = 0.0;
  std::string method;  // quadrature | plancherel | closed-form
  double est_abs_error = 0.0;
  bool converged = true;
  std::string model_id;
  std::string space;
  std::vector<double> hypothesis_params;

  static EntropyReport make(double V, std::string method, double err);
  std::string to_json() const;
};

/// The error variable E = Y - f(X) as a finite mixture: with d_k = f(x_k) - f*(x_k)
/// at the marginal nodes, p_E(e) = sum_k w_k p_{eps|x_k}(e + d_k).
struct ErrorMixture {
  struct Component {
    double w, shift;
    const NoiseDensity* law;
  };
  std::vector<Component> parts;

  ErrorMixture(const RegressionModel& model, const Hypothesis& f,
               std::size_t nodes = kMarginalNodes, std::size_t panels = 0);
  double pdf(double e) const;
  std::complex<double> char_fn(double xi) const;
  /// Discontinuities of p_E.
  std::vector<double> breakpoints() const;
  /// Exact int p_E^2 when every component is a step density.
  std::optional<double> step_square_integral() const;
  /// Interval holding all but `mass` of the probability.
  std::pair<double, double> range(double mass) const;
};

double error_density(const RegressionModel& model, const Hypothesis& f, double e);

/// -int p_E^2 de by adaptive quadrature (abs tol 1e-9; 1e-6 for heavy tails).
EntropyReport v_functional(const RegressionModel& model, const Hypothesis& f);

/// V through -(1/pi) int_0^inf |p^_E(xi)|^2 dxi. Requires a homoskedastic model.
EntropyReport v_plancherel_homoskedastic(const RegressionModel& model, const Hypothesis& f);
/// Same route without the homoskedastic restriction.
EntropyReport v_fourier(const RegressionModel& model, const Hypothesis& f);

/// E_h(f) = -int p_E(e) (G_h * p_E)(e) de. Uses the closed-form smoothed
/// densities when every branch has one, else the Fourier route.
double info_error_true(const RegressionModel& model, const Hypothesis& f, double h);
/// E_h(f) = -(1/pi) int_0^inf exp(-h^2 xi^2 / 2) |p^_E(xi)|^2 dxi.
double info_error_fourier(const RegressionModel& model, const Hypothesis& f, double h);

struct ApproxErrorCheck {
  double A_h_est = 0.0;
  std::optional<double> bound;  // M' h when M' is known
  bool holds() const { return !bound || A_h_est <= *bound; }
};

/// max over f_set of |E_h(f) - V(f)|, compared against M' h.
ApproxErrorCheck approx_error_bound_check(const RegressionModel& model,
                                          const std::vector<Hypothesis>& f_set, double h);

struct Bracket {
  double B_L = 0.0, B_U = 0.0;
};

/// min / max of int p_E^2 over the grid. Throws if 0 < B_L or B_U <= M_p fails.
Bracket bl_bu_bracket(const RegressionModel& model, const std::vector<Hypothesis>& f_grid);

/// Both sides of int int (d(x) - d(u))^2 = 2 || d - E d ||^2 with d = f - f*,
/// the left by the tensor rule and the right by the single rule.
struct VarianceIdentity {
  double double_integral = 0.0;
  double twice_centered = 0.0;
};
VarianceIdentity variance_identity(const RegressionModel& model, const Hypothesis& f);

/// int_{|xi| <= a} xi^2 exp(-h^2 xi^2 / 2) dxi with a = min(pi / 4M, c0), by quadrature.
double p1_curvature_integral(double M, double c0, double h);

/// pi^3 / (2 c_h C0). Needs a P1 model and passing evidence.
double p1_convergence_constant(const RegressionModel& model, const P1Evidence& evidence, double h);

struct Curvature {
  double second = 0.0;   // T''(t)
  double first = 0.0;    // T'(t)
  double threshold = 0.0;  // 4M + 2 M~
  std::optional<double> lower_bound;  // present when h exceeds the threshold
};

/// Derivatives of T(t) = -int exp(-(w - t)^2 / 2h^2) g(w) dw, g the density
/// of eps_x - eps_u. Needs a P2 model and |t| <= 4M.
Curvature p2_curvature(const RegressionModel& model, double x, double u, double t, double h);
/// T'(t) alone.
double p2_slope(const RegressionModel& model, double x, double u, double t, double h);

/// Density of eps_x - eps_u at w.
double difference_density(const RegressionModel& model, double x, double u, double w);

} // namespace mee
