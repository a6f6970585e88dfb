#pragma once

#include "mee/quadrature.hpp"
#include "mee/rng.hpp"

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mee {

/// One box of a step density: height on [lo, hi] (closed).
struct StepPiece {
  double lo, hi, height;
};

/// A univariate noise density. All registered laws are symmetric except
/// general step densities, which may be anything piecewise constant.
class NoiseDensity {
public:
  virtual ~NoiseDensity() = default;

  virtual std::string id() const = 0;
  virtual double pdf(double e) const = 0;
  virtual double cdf(double e) const;
  virtual double sample(Rng& rng) const = 0;

  /// Closed-form characteristic function int p(e) exp(-i xi e) de, if known.
  virtual std::optional<std::complex<double>> char_fn_closed(double xi) const {
    (void)xi;
    return std::nullopt;
  }
  /// Closed form when available, otherwise char_fn_numeric.
  std::complex<double> char_fn(double xi) const;
  /// Quadrature of the defining integral. Light tails are truncated where the
  /// remaining mass is negligible; heavy tails get a two-term
  /// integration-by-parts tail. `err` receives the error estimate.
  std::complex<double> char_fn_numeric(double xi, double* err = nullptr) const;

  virtual bool symmetric() const { return true; }
  virtual double pdf_bound() const = 0;                  // sup p
  virtual std::optional<double> deriv_bound() const { return std::nullopt; }   // sup |p'|
  virtual std::optional<double> support_bound() const { return std::nullopt; } // p = 0 beyond
  virtual bool heavy_tailed() const { return false; }

  /// Points where p is discontinuous or kinked.
  virtual std::vector<double> breakpoints() const { return {}; }
  /// R with P(|eps| > R) <= mass.
  virtual double tail_radius(double mass) const = 0;
  /// p'(e); default is a central difference.
  virtual double pdf_derivative(double e) const;

  /// (G_h * p)(e), the density of eps + h Z. Default inverts the damped
  /// characteristic function.
  virtual double smoothed_pdf(double e, double h) const;
  /// True when smoothed_pdf has a closed form (cheap to evaluate).
  virtual bool closed_smoothing() const { return false; }

  /// Bound on int_X^inf |p^(xi)|^2 dxi, used to truncate Fourier integrals.
  virtual double char_sq_tail(double X) const = 0;

  /// Step representation when the law is piecewise constant.
  virtual const std::vector<StepPiece>* as_step() const { return nullptr; }

  /// int p(e)^2 de.
  virtual double square_integral() const;
};

using NoisePtr = std::shared_ptr<const NoiseDensity>;

class GaussianNoise final : public NoiseDensity {
public:
  explicit GaussianNoise(double sigma);
  std::string id() const override;
  double pdf(double e) const override;
  double cdf(double e) const override;
  double sample(Rng& rng) const override { return sigma_ * rng.normal(); }
  std::optional<std::complex<double>> char_fn_closed(double xi) const override;
  double pdf_bound() const override;
  std::optional<double> deriv_bound() const override;
  double tail_radius(double mass) const override;
  double pdf_derivative(double e) const override;
  double smoothed_pdf(double e, double h) const override;
  bool closed_smoothing() const override { return true; }
  double char_sq_tail(double X) const override;
  double square_integral() const override;
  double sigma() const { return sigma_; }

private:
  double sigma_;
};

/// Symmetric alpha-stable law with characteristic function exp(-(gamma|xi|)^alpha),
/// 0 < alpha <= 2. alpha = 2 is N(0, 2 gamma^2), alpha = 1 is Cauchy(gamma).
class StableNoise final : public NoiseDensity {
public:
  StableNoise(double gamma, double alpha);
  std::string id() const override;
  double pdf(double e) const override;
  double cdf(double e) const override;
  double sample(Rng& rng) const override;
  std::optional<std::complex<double>> char_fn_closed(double xi) const override;
  double pdf_bound() const override;
  std::optional<double> deriv_bound() const override;
  bool heavy_tailed() const override { return alpha_ < 2.0; }
  double tail_radius(double mass) const override;
  double smoothed_pdf(double e, double h) const override;
  bool closed_smoothing() const override { return alpha_ == 2.0; }
  double char_sq_tail(double X) const override;
  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }

  /// Standard (gamma = 1) draw; shared with the Linnik sampler.
  static double standard_draw(double alpha, Rng& rng);
  /// Standard density and cdf for x >= 0.
  static double standard_pdf(double alpha, double x);
  static double standard_cdf(double alpha, double x);

private:
  double gamma_, alpha_;
};

/// Linnik law with characteristic function 1/(1 + (lambda|xi|)^alpha),
/// 1 < alpha <= 2. alpha = 2 is the Laplace law with scale lambda.
class LinnikNoise final : public NoiseDensity {
public:
  LinnikNoise(double lambda, double alpha);
  std::string id() const override;
  double pdf(double e) const override;
  double cdf(double e) const override;
  double sample(Rng& rng) const override;
  std::optional<std::complex<double>> char_fn_closed(double xi) const override;
  double pdf_bound() const override;
  std::optional<double> deriv_bound() const override;
  bool heavy_tailed() const override { return alpha_ < 2.0; }
  std::vector<double> breakpoints() const override { return {0.0}; }
  double tail_radius(double mass) const override;
  double smoothed_pdf(double e, double h) const override;
  bool closed_smoothing() const override { return alpha_ == 2.0; }
  double char_sq_tail(double X) const override;
  double square_integral() const override;
  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }

private:
  double lambda_, alpha_;
};

/// Piecewise-constant density given as a sum of boxes.
class StepNoise final : public NoiseDensity {
public:
  StepNoise(std::string name, std::vector<StepPiece> pieces);
  /// Uniform on [-a, a].
  static std::shared_ptr<StepNoise> uniform(double a);
  /// Uniform on [-outer, -inner] U [inner, outer].
  static std::shared_ptr<StepNoise> shell(double inner, double outer);

  std::string id() const override { return name_; }
  double pdf(double e) const override;
  double cdf(double e) const override;
  double sample(Rng& rng) const override;
  std::optional<std::complex<double>> char_fn_closed(double xi) const override;
  bool symmetric() const override { return symmetric_; }
  double pdf_bound() const override;
  std::optional<double> support_bound() const override;
  std::vector<double> breakpoints() const override;
  double tail_radius(double mass) const override;
  double pdf_derivative(double e) const override;
  double smoothed_pdf(double e, double h) const override;
  bool closed_smoothing() const override { return true; }
  double char_sq_tail(double X) const override;
  const std::vector<StepPiece>* as_step() const override { return &pieces_; }
  double square_integral() const override;

private:
  std::string name_;
  std::vector<StepPiece> pieces_;
  std::vector<double> cum_mass_;
  bool symmetric_ = true;
};

enum class NoiseTag : unsigned { homoskedastic = 1, p1 = 2, p2 = 4 };

/// Conditional noise law eps | X = x: a list of branches, each owning the
/// inputs in [lo, hi]. A homoskedastic family has one branch covering R.
class NoiseFamily {
public:
  struct Branch {
    double lo, hi;
    NoisePtr law;
  };

  NoiseFamily() = default;
  static NoiseFamily homoskedastic(NoisePtr law);
  static NoiseFamily piecewise(std::vector<Branch> branches);

  const NoiseDensity& at(double x) const;
  const std::vector<Branch>& branches() const { return branches_; }
  bool is_homoskedastic() const { return branches_.size() == 1; }

  bool symmetric() const;
  double pdf_bound() const;
  std::optional<double> deriv_bound() const;
  std::optional<double> support_bound() const;
  bool heavy_tailed() const;
  bool all_step() const;

  unsigned tags() const { return tags_; }
  bool has(NoiseTag t) const { return (tags_ & static_cast<unsigned>(t)) != 0; }
  void add_tag(NoiseTag t) { tags_ |= static_cast<unsigned>(t); }

private:
  std::vector<Branch> branches_;
  unsigned tags_ = 0;
};

double density_at(const NoiseFamily& family, double e, double x);
std::complex<double> char_fn_at(const NoiseFamily& family, double xi, double x);
double sample_noise(const NoiseFamily& family, double x, Rng& rng);

struct P1Evidence {
  bool ok = false;
  double c0 = 0.0;
  double C0 = 0.0;
  double grid_min_charfn = 0.0;
  bool unimodal_check = false;
  bool nonnegative_check = false;
  // On failure: where the check broke.
  std::optional<double> witness_xi;
  std::optional<double> witness_e;
  std::optional<double> witness_x;
  std::string reason;
};

/// Checks nonnegativity of the characteristic function on xi_grid and
/// unimodality of the density (4096-point grid on the truncated support)
/// at every x in x_grid. C0 is the minimum of the characteristic function
/// over xi_grid points with |xi| <= c0.
P1Evidence check_p1(const NoiseFamily& family, double c0, std::span<const double> xi_grid,
                    std::span<const double> x_grid);

struct P2Evidence {
  bool ok = false;
  double support = 0.0;  // tightest M~ on the scan grid
  std::optional<double> witness_e;
  std::optional<double> witness_x;
  std::string reason;
};

/// Grid scan for symmetry and compact support.
P2Evidence check_p2(const NoiseFamily& family, std::span<const double> x_grid);

} // namespace mee
