#include "mee/noise_models.hpp"

#include "mee/errors.hpp"
#include "mee/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mee {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Panel edges every half period of cos(xi e) over [a, b], merged with the
// law's own breakpoints.
std::vector<double> oscillation_partition(double a, double b, double xi,
                                          std::span<const double> extra) {
  std::vector<double> pts{a, b};
  const double axi = std::abs(xi);
  if (axi > 0.0) {
    const double step = kPi / axi;
    const double count = (b - a) / step;
    const double stride = count > 2e5 ? (b - a) / 2e5 : step;
    for (double t = std::ceil(a / stride) * stride; t < b; t += stride)
      if (t > a) pts.push_back(t);
  }
  for (double p : extra)
    if (p > a && p < b) pts.push_back(p);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double find_gauss_radius(double sigma, double mass) {
  // 2 Phi(-z) = mass
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::numbers::sqrt2) > mass) lo = mid;
    else hi = mid;
  }
  return sigma * hi;
}

// Asymptotic two-sided tail constant for stable-like laws: P(|X| > R) ~ 2 C R^-alpha.
double stable_tail_constant(double alpha) {
  return std::tgamma(alpha) * std::sin(kPi * alpha / 2.0) / kPi;
}

} // namespace

// ---------------------------------------------------------------- base

double NoiseDensity::cdf(double e) const {
  const auto bps = breakpoints();
  if (symmetric()) {
    const auto pts = quad::make_partition(0.0, std::abs(e), bps);
    const double half = quad::integrate_partitioned([&](double t) { return pdf(t); }, pts,
                                                    {1e-13, 1e-12, 200000})
                            .value;
    return e >= 0 ? 0.5 + half : 0.5 - half;
  }
  const double lo = -tail_radius(1e-14);
  if (e <= lo) return 0.0;
  const auto pts = quad::make_partition(lo, e, bps);
  return quad::integrate_partitioned([&](double t) { return pdf(t); }, pts,
                                     {1e-13, 1e-12, 200000})
      .value;
}

std::complex<double> NoiseDensity::char_fn(double xi) const {
  if (auto c = char_fn_closed(xi)) return *c;
  return char_fn_numeric(xi);
}

std::complex<double> NoiseDensity::char_fn_numeric(double xi, double* err) const {
  const auto bps = breakpoints();
  const quad::Options opt{1e-13, 0.0, 5'000'000};
  double error = 0.0;
  std::complex<double> out;

  if (!heavy_tailed()) {
    const double R = support_bound() ? *support_bound() : tail_radius(1e-13);
    const auto pts = oscillation_partition(-R, R, xi, bps);
    const auto re =
        quad::integrate_partitioned([&](double e) { return pdf(e) * std::cos(xi * e); }, pts, opt);
    const auto im =
        quad::integrate_partitioned([&](double e) { return -pdf(e) * std::sin(xi * e); }, pts, opt);
    error = re.abs_error + im.abs_error + (support_bound() ? 0.0 : 1e-13);
    out = {re.value, im.value};
  } else {
    // Symmetric heavy tail: 2 int_0^R p cos + 2 * tail(R).
    const double axi = std::abs(xi);
    double R = tail_radius(1e-3);
    if (axi == 0.0) {
      const auto pts = quad::make_partition(0.0, R, bps);
      const auto core = quad::integrate_partitioned([&](double e) { return pdf(e); }, pts, opt);
      out = {2.0 * core.value + 2.0 * (1.0 - cdf(R)), 0.0};
      error = 2.0 * core.abs_error;
    } else {
      while (std::abs(pdf_derivative(R)) / (axi * axi) > 1e-12 && R < 1e8) R *= 2.0;
      const auto pts = oscillation_partition(0.0, R, axi, bps);
      const auto core = quad::integrate_partitioned(
          [&](double e) { return pdf(e) * std::cos(axi * e); }, pts, opt);
      const double pR = pdf(R), dR = pdf_derivative(R);
      const double tail = -pR * std::sin(axi * R) / axi - dR * std::cos(axi * R) / (axi * axi);
      out = {2.0 * (core.value + tail), 0.0};
      error = 2.0 * (core.abs_error + std::abs(dR) / (axi * axi));
    }
  }
  if (err) *err = error;
  return out;
}

double NoiseDensity::pdf_derivative(double e) const {
  const double d = 1e-4 * std::max(1.0, std::abs(e));
  return (pdf(e + d) - pdf(e - d)) / (2.0 * d);
}

double NoiseDensity::smoothed_pdf(double e, double h) const {
  if (!(h > 0.0)) throw InvalidBandwidth(h);
  // Symmetric laws: (1/pi) int_0^inf p^(xi) cos(xi e) exp(-h^2 xi^2 / 2) dxi.
  const double cutoff = std::sqrt(2.0 * 36.0) / h;
  const double freq = std::max(std::abs(e), 1.0);
  const auto pts = oscillation_partition(0.0, cutoff, freq, {});
  if (symmetric()) {
    const auto r = quad::integrate_partitioned(
        [&](double xi) {
          return char_fn(xi).real() * std::cos(xi * e) * std::exp(-0.5 * h * h * xi * xi);
        },
        pts, {1e-13, 1e-12, 2'000'000});
    return std::max(0.0, r.value / kPi);
  }
  const auto r = quad::integrate_partitioned(
      [&](double xi) {
        const auto c = char_fn(xi);
        return (c.real() * std::cos(xi * e) - c.imag() * std::sin(xi * e)) *
               std::exp(-0.5 * h * h * xi * xi);
      },
      pts, {1e-13, 1e-12, 2'000'000});
  return std::max(0.0, r.value / kPi);
}

double NoiseDensity::char_sq_tail(double X) const {
  // Geometric panels until a panel adds nothing.
  double total = 0.0;
  double a = X, w = std::max(1.0, X);
  for (int k = 0; k < 80; ++k) {
    const double b = a + w;
    const double v = quad::integrate([&](double xi) { return std::norm(char_fn(xi)); }, a, b,
                                     {1e-16, 1e-10, 200000})
                         .value;
    total += v;
    if (v < 1e-18 || v < 1e-12 * total) break;
    a = b;
    w *= 2.0;
  }
  return total;
}

double NoiseDensity::square_integral() const {
  const double R = support_bound() ? *support_bound() : tail_radius(1e-12);
  const auto pts = quad::make_partition(-R, R, breakpoints());
  return quad::integrate_partitioned(
             [&](double e) {
               const double p = pdf(e);
               return p * p;
             },
             pts, {1e-13, 1e-12, 2'000'000})
      .value;
}

// ---------------------------------------------------------------- Gaussian

GaussianNoise::GaussianNoise(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0)) throw InvalidModel("gaussian: sigma must be > 0");
}

std::string GaussianNoise::id() const { return "gaussian(sigma=" + fmt(sigma_) + ")"; }

double GaussianNoise::pdf(double e) const { return special::normal_pdf(e / sigma_) / sigma_; }

double GaussianNoise::cdf(double e) const { return special::normal_cdf(e / sigma_); }

std::optional<std::complex<double>> GaussianNoise::char_fn_closed(double xi) const {
  return std::complex<double>(std::exp(-0.5 * sigma_ * sigma_ * xi * xi), 0.0);
}

double GaussianNoise::pdf_bound() const { return special::kInvSqrt2Pi / sigma_; }

std::optional<double> GaussianNoise::deriv_bound() const {
  return special::kInvSqrt2Pi * std::exp(-0.5) / (sigma_ * sigma_);
}

double GaussianNoise::tail_radius(double mass) const { return find_gauss_radius(sigma_, mass); }

double GaussianNoise::pdf_derivative(double e) const { return -e / (sigma_ * sigma_) * pdf(e); }

double GaussianNoise::smoothed_pdf(double e, double h) const {
  if (!(h > 0.0)) throw InvalidBandwidth(h);
  const double s = std::sqrt(sigma_ * sigma_ + h * h);
  return special::normal_pdf(e / s) / s;
}

double GaussianNoise::char_sq_tail(double X) const {
  return std::sqrt(kPi) / (2.0 * sigma_) * std::erfc(sigma_ * X);
}

double GaussianNoise::square_integral() const { return 1.0 / (2.0 * sigma_ * std::sqrt(kPi)); }

// ---------------------------------------------------------------- stable

StableNoise::StableNoise(double gamma, double alpha) : gamma_(gamma), alpha_(alpha) {
  if (!(gamma > 0.0)) throw InvalidModel("stable: gamma must be > 0");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidModel("stable: alpha must be in (0, 2]");
}

std::string StableNoise::id() const {
  return "stable(gamma=" + fmt(gamma_) + ",alpha=" + fmt(alpha_) + ")";
}

namespace {

// log g(theta) for the symmetric Zolotarev representation, g = x^{a/(a-1)} V(theta).
double zolotarev_log_g(double alpha, double logx, double th) {
  const double ex = alpha / (alpha - 1.0);
  const double c = std::cos(th);
  return logx + ex * (std::log(c) - std::log(std::sin(alpha * th))) +
         std::log(std::cos((alpha - 1.0) * th)) - std::log(c);
}

// Breakpoints on (0, pi/2) where log g crosses log 60, 0 and a few negative
// levels. The mass of g e^{-g} can be very narrow; unanchored, adaptive
// quadrature steps over it.
std::vector<double> zolotarev_partition(double alpha, double logx) {
  constexpr double eps = 1e-12;
  const double lo0 = eps, hi0 = kPi / 2 - eps;
  const double glo = zolotarev_log_g(alpha, logx, lo0), ghi = zolotarev_log_g(alpha, logx, hi0);
  std::vector<double> pts{0.0};
  for (double target : {std::log(60.0), 0.0, -4.0, -12.0, -40.0}) {
    if ((glo < target) == (ghi < target)) continue;
    double lo = lo0, hi = hi0;
    for (int i = 0; i < 64; ++i) {
      const double mid = 0.5 * (lo + hi);
      if ((zolotarev_log_g(alpha, logx, mid) < target) == (glo < target)) lo = mid;
      else hi = mid;
    }
    pts.push_back(0.5 * (lo + hi));
  }
  pts.push_back(kPi / 2);
  std::sort(pts.begin(), pts.end());
  return pts;
}

} // namespace

double StableNoise::standard_pdf(double alpha, double x) {
  x = std::abs(x);
  if (alpha == 2.0) return std::exp(-0.25 * x * x) / (2.0 * std::sqrt(kPi));
  if (alpha == 1.0) return 1.0 / (kPi * (1.0 + x * x));
  const double p0 = std::tgamma(1.0 + 1.0 / alpha) / kPi;
  if (x < 1e-7) return p0;
  // Zolotarev integral for the symmetric case:
  //   p(x) = alpha / (pi |alpha-1| x) int_0^{pi/2} g e^{-g} dtheta.
  const double logx = alpha / (alpha - 1.0) * std::log(x);
  auto integrand = [&](double th) {
    if (th <= 0.0 || th >= kPi / 2) return 0.0;
    const double lg = zolotarev_log_g(alpha, logx, th);
    if (lg > 700.0) return 0.0;
    const double g = std::exp(lg);
    return g * std::exp(-g);
  };
  const auto r = quad::integrate_partitioned(integrand, zolotarev_partition(alpha, logx),
                                             {1e-300, 1e-12, 400000});
  return alpha / (kPi * std::abs(alpha - 1.0) * x) * r.value;
}

double StableNoise::standard_cdf(double alpha, double x) {
  if (x < 0) return 1.0 - standard_cdf(alpha, -x);
  if (alpha == 2.0) return special::normal_cdf(x / std::numbers::sqrt2);
  if (alpha == 1.0) return 0.5 + std::atan(x) / kPi;
  if (x == 0.0) return 0.5;
  const double logx = alpha / (alpha - 1.0) * std::log(x);
  auto integrand = [&](double th) {
    if (th <= 0.0 || th >= kPi / 2) return 0.0;
    const double lg = zolotarev_log_g(alpha, logx, th);
    if (lg > 700.0) return 0.0;
    return std::exp(-std::exp(lg));
  };
  const auto r = quad::integrate_partitioned(integrand, zolotarev_partition(alpha, logx),
                                             {1e-300, 1e-12, 400000});
  return alpha > 1.0 ? 1.0 - r.value / kPi : 0.5 + r.value / kPi;
}

double StableNoise::standard_draw(double alpha, Rng& rng) {
  const double u = kPi * (rng.uniform_open() - 0.5);
  if (alpha == 1.0) return std::tan(u);
  const double w = rng.exponential();
  return std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
}

double StableNoise::pdf(double e) const { return standard_pdf(alpha_, e / gamma_) / gamma_; }

double StableNoise::cdf(double e) const { return standard_cdf(alpha_, e / gamma_); }

double StableNoise::sample(Rng& rng) const { return gamma_ * standard_draw(alpha_, rng); }

std::optional<std::complex<double>> StableNoise::char_fn_closed(double xi) const {
  return std::complex<double>(std::exp(-std::pow(gamma_ * std::abs(xi), alpha_)), 0.0);
}

double StableNoise::pdf_bound() const {
  return std::tgamma(1.0 + 1.0 / alpha_) / (kPi * gamma_);
}

std::optional<double> StableNoise::deriv_bound() const {
  if (alpha_ == 2.0) return special::kInvSqrt2Pi * std::exp(-0.5) / (2.0 * gamma_ * gamma_);
  if (alpha_ == 1.0) return 3.0 * std::sqrt(3.0) / (8.0 * kPi * gamma_ * gamma_);
  return std::nullopt;
}

double StableNoise::tail_radius(double mass) const {
  if (alpha_ == 2.0) return find_gauss_radius(std::numbers::sqrt2 * gamma_, mass);
  if (alpha_ == 1.0) return gamma_ / std::tan(kPi * mass / 2.0);
  // Asymptotic tail with a safety factor of 2 on the radius.
  return 2.0 * gamma_ * std::pow(2.0 * stable_tail_constant(alpha_) / mass, 1.0 / alpha_);
}

double StableNoise::smoothed_pdf(double e, double h) const {
  if (!(h > 0.0)) throw InvalidBandwidth(h);
  if (alpha_ == 2.0) {
    const double s = std::sqrt(2.0 * gamma_ * gamma_ + h * h);
    return special::normal_pdf(e / s) / s;
  }
  return NoiseDensity::smoothed_pdf(e, h);
}

double StableNoise::char_sq_tail(double X) const {
  if (alpha_ == 2.0) {
    return std::sqrt(kPi) / (2.0 * std::numbers::sqrt2 * gamma_) *
           std::erfc(std::numbers::sqrt2 * gamma_ * X);
  }
  return NoiseDensity::char_sq_tail(X);
}

// ---------------------------------------------------------------- Linnik

LinnikNoise::LinnikNoise(double lambda, double alpha) : lambda_(lambda), alpha_(alpha) {
  if (!(lambda > 0.0)) throw InvalidModel("linnik: lambda must be > 0");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw InvalidModel("linnik: alpha must be in (1, 2]");
}

std::string LinnikNoise::id() const {
  if (alpha_ == 2.0) return "laplace(scale=" + fmt(lambda_) + ")";
  return "linnik(lambda=" + fmt(lambda_) + ",alpha=" + fmt(alpha_) + ")";
}

namespace {

// Kozubowski mixture integral for the standard Linnik law, x > 0:
//   int_0^inf v^power e^{-v x} / (1 + v^{2a} + 2 v^a cos(pi a / 2)) dv
double linnik_integral(double a, double x, double power) {
  const double ca = std::cos(kPi * a / 2.0);
  auto f = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double va = std::pow(v, a);
    return std::pow(v, power) * std::exp(-v * x) / (1.0 + va * va + 2.0 * va * ca);
  };
  // The integrand behaves like v^{power - 2a} e^{-vx} at infinity.
  const double vmax = std::max(40.0 / x, 1e3);
  const auto pts = quad::make_partition(0.0, vmax, std::array<double, 1>{1.0});
  auto r = quad::integrate_partitioned(f, pts, {1e-300, 1e-12, 1'000'000});
  // Remaining tail ~ int_vmax^inf v^{power-2a} e^{-vx}, bounded by the power part.
  const double q = power - 2.0 * a;
  if (q < -1.0) r.value += std::pow(vmax, q + 1.0) / (-(q + 1.0)) * std::exp(-vmax * x);
  return r.value;
}

} // namespace

double LinnikNoise::pdf(double e) const {
  const double x = std::abs(e) / lambda_;
  if (alpha_ == 2.0) return 0.5 * std::exp(-x) / lambda_;
  if (x == 0.0) return 1.0 / (alpha_ * std::sin(kPi / alpha_) * lambda_);
  const double s = std::sin(kPi * alpha_ / 2.0) / kPi;
  return s * linnik_integral(alpha_, x, alpha_) / lambda_;
}

double LinnikNoise::cdf(double e) const {
  const double x = std::abs(e) / lambda_;
  double upper;
  if (alpha_ == 2.0) upper = 0.5 * std::exp(-x);
  else if (x == 0.0) upper = 0.5;
  else upper = std::sin(kPi * alpha_ / 2.0) / kPi * linnik_integral(alpha_, x, alpha_ - 1.0);
  return e >= 0 ? 1.0 - upper : upper;
}

double LinnikNoise::sample(Rng& rng) const {
  const double w = rng.exponential();
  if (alpha_ == 2.0) return lambda_ * std::sqrt(w) * std::numbers::sqrt2 * rng.normal();
  return lambda_ * std::pow(w, 1.0 / alpha_) * StableNoise::standard_draw(alpha_, rng);
}

std::optional<std::complex<double>> LinnikNoise::char_fn_closed(double xi) const {
  return std::complex<double>(1.0 / (1.0 + std::pow(lambda_ * std::abs(xi), alpha_)), 0.0);
}

double LinnikNoise::pdf_bound() const {
  if (alpha_ == 2.0) return 0.5 / lambda_;
  return 1.0 / (alpha_ * std::sin(kPi / alpha_) * lambda_);
}

std::optional<double> LinnikNoise::deriv_bound() const {
  if (alpha_ == 2.0) return 0.5 / (lambda_ * lambda_);
  return std::nullopt;
}

double LinnikNoise::tail_radius(double mass) const {
  if (alpha_ == 2.0) return lambda_ * std::log(1.0 / mass);
  return 2.0 * lambda_ * std::pow(2.0 * stable_tail_constant(alpha_) / mass, 1.0 / alpha_);
}

double LinnikNoise::smoothed_pdf(double e, double h) const {
  if (!(h > 0.0)) throw InvalidBandwidth(h);
  const double b = lambda_;
  if (alpha_ == 2.0 && h / b < 20.0) {
    const double r = h / b, z = e / h;
    const double a = 0.5 * r * r;
    const double t1 = std::exp(a - e / b) * std::erfc((r - z) / std::numbers::sqrt2);
    const double t2 = std::exp(a + e / b) * std::erfc((r + z) / std::numbers::sqrt2);
    return (t1 + t2) / (4.0 * b);
  }
  return NoiseDensity::smoothed_pdf(e, h);
}

double LinnikNoise::char_sq_tail(double X) const {
  if (alpha_ == 2.0) {
    // int_X^inf (1 + l^2 t^2)^-2 dt
    const double u = lambda_ * X;
    return (kPi / 4.0 - 0.5 * (std::atan(u) + u / (1.0 + u * u))) / lambda_;
  }
  return NoiseDensity::char_sq_tail(X);
}

double LinnikNoise::square_integral() const {
  if (alpha_ == 2.0) return 0.25 / lambda_;
  return NoiseDensity::square_integral();
}

// ---------------------------------------------------------------- step

StepNoise::StepNoise(std::string name, std::vector<StepPiece> pieces)
    : name_(std::move(name)), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw InvalidModel("step density needs at least one piece");
  double mass = 0.0;
  for (const auto& p : pieces_) {
    if (!(p.hi > p.lo) || !(p.height >= 0.0))
      throw InvalidModel("step density: each piece needs lo < hi and height >= 0");
    mass += p.height * (p.hi - p.lo);
    cum_mass_.push_back(mass);
  }
  if (std::abs(mass - 1.0) > 1e-12)
    throw InvalidModel("step density: total mass " + fmt(mass) + " != 1");
  for (const double b : breakpoints()) {
    for (const double d : {-1e-9, 1e-9}) {
      if (std::abs(pdf(b + d) - pdf(-(b + d))) > 1e-15) symmetric_ = false;
    }
  }
}

std::shared_ptr<StepNoise> StepNoise::uniform(double a) {
  if (!(a > 0.0)) throw InvalidModel("uniform: half-width must be > 0");
  return std::make_shared<StepNoise>("uniform(a=" + fmt(a) + ")",
                                     std::vector<StepPiece>{{-a, a, 0.5 / a}});
}

std::shared_ptr<StepNoise> StepNoise::shell(double inner, double outer) {
  if (!(outer > inner && inner >= 0.0)) throw InvalidModel("shell: need 0 <= inner < outer");
  const double h = 0.5 / (outer - inner);
  return std::make_shared<StepNoise>(
      "shell(inner=" + fmt(inner) + ",outer=" + fmt(outer) + ")",
      std::vector<StepPiece>{{-outer, -inner, h}, {inner, outer, h}});
}

double StepNoise::pdf(double e) const {
  double s = 0.0;
  for (const auto& p : pieces_)
    if (e >= p.lo && e <= p.hi) s += p.height;
  return s;
}

double StepNoise::cdf(double e) const {
  double s = 0.0;
  for (const auto& p : pieces_) s += p.height * std::clamp(e - p.lo, 0.0, p.hi - p.lo);
  return s;
}

double StepNoise::sample(Rng& rng) const {
  const double u = rng.uniform() * cum_mass_.back();
  std::size_t k = 0;
  while (k + 1 < pieces_.size() && u >= cum_mass_[k]) ++k;
  const auto& p = pieces_[k];
  return p.lo + (p.hi - p.lo) * rng.uniform();
}

std::optional<std::complex<double>> StepNoise::char_fn_closed(double xi) const {
  std::complex<double> s;
  for (const auto& p : pieces_) {
    const double w = p.hi - p.lo, m = 0.5 * (p.lo + p.hi);
    const double mag = p.height * w * special::sinc(0.5 * xi * w);
    s += mag * std::complex<double>(std::cos(xi * m), -std::sin(xi * m));
  }
  return s;
}

double StepNoise::pdf_bound() const {
  auto bps = breakpoints();
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i)
    best = std::max(best, pdf(0.5 * (bps[i] + bps[i + 1])));
  for (double b : bps) best = std::max(best, pdf(b));
  return best;
}

std::optional<double> StepNoise::support_bound() const {
  double r = 0.0;
  for (const auto& p : pieces_)
    if (p.height > 0.0) r = std::max({r, std::abs(p.lo), std::abs(p.hi)});
  return r;
}

std::vector<double> StepNoise::breakpoints() const {
  std::vector<double> b;
  for (const auto& p : pieces_) {
    b.push_back(p.lo);
    b.push_back(p.hi);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

double StepNoise::tail_radius(double) const { return *support_bound(); }

double StepNoise::pdf_derivative(double) const { return 0.0; }

double StepNoise::smoothed_pdf(double e, double h) const {
  if (!(h > 0.0)) throw InvalidBandwidth(h);
  double s = 0.0;
  for (const auto& p : pieces_)
    s += p.height * (special::normal_cdf((e - p.lo) / h) - special::normal_cdf((e - p.hi) / h));
  return s;
}

double StepNoise::char_sq_tail(double X) const {
  double c = 0.0;
  for (const auto& p : pieces_) c += 2.0 * p.height;
  return c * c / X;
}

double StepNoise::square_integral() const {
  const auto b = breakpoints();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const double v = pdf(0.5 * (b[i] + b[i + 1]));
    s += v * v * (b[i + 1] - b[i]);
  }
  return s;
}

// ---------------------------------------------------------------- family

NoiseFamily NoiseFamily::homoskedastic(NoisePtr law) {
  NoiseFamily f;
  f.branches_.push_back({-HUGE_VAL, HUGE_VAL, std::move(law)});
  f.add_tag(NoiseTag::homoskedastic);
  return f;
}

NoiseFamily NoiseFamily::piecewise(std::vector<Branch> branches) {
  if (branches.empty()) throw InvalidModel("noise family needs at least one branch");
  NoiseFamily f;
  f.branches_ = std::move(branches);
  if (f.branches_.size() == 1) f.add_tag(NoiseTag::homoskedastic);
  return f;
}

const NoiseDensity& NoiseFamily::at(double x) const {
  for (const auto& b : branches_)
    if (x >= b.lo && x <= b.hi) return *b.law;
  throw InvalidInput("no noise branch covers x=" + fmt(x));
}

bool NoiseFamily::symmetric() const {
  return std::all_of(branches_.begin(), branches_.end(),
                     [](const Branch& b) { return b.law->symmetric(); });
}

double NoiseFamily::pdf_bound() const {
  double m = 0.0;
  for (const auto& b : branches_) m = std::max(m, b.law->pdf_bound());
  return m;
}

std::optional<double> NoiseFamily::deriv_bound() const {
  double m = 0.0;
  for (const auto& b : branches_) {
    auto d = b.law->deriv_bound();
    if (!d) return std::nullopt;
    m = std::max(m, *d);
  }
  return m;
}

std::optional<double> NoiseFamily::support_bound() const {
  double m = 0.0;
  for (const auto& b : branches_) {
    auto d = b.law->support_bound();
    if (!d) return std::nullopt;
    m = std::max(m, *d);
  }
  return m;
}

bool NoiseFamily::heavy_tailed() const {
  return std::any_of(branches_.begin(), branches_.end(),
                     [](const Branch& b) { return b.law->heavy_tailed(); });
}

bool NoiseFamily::all_step() const {
  return std::all_of(branches_.begin(), branches_.end(),
                     [](const Branch& b) { return b.law->as_step() != nullptr; });
}

double density_at(const NoiseFamily& family, double e, double x) { return family.at(x).pdf(e); }

std::complex<double> char_fn_at(const NoiseFamily& family, double xi, double x) {
  return family.at(x).char_fn(xi);
}

double sample_noise(const NoiseFamily& family, double x, Rng& rng) {
  return family.at(x).sample(rng);
}

// ---------------------------------------------------------------- class checks

namespace {

std::optional<double> asymmetry_witness(const NoiseDensity& law, double R) {
  constexpr int kGrid = 4096;
  for (int i = 0; i <= kGrid; ++i) {
    const double e = R * i / kGrid;
    if (std::abs(law.pdf(e) - law.pdf(-e)) > 1e-12 * std::max(1.0, law.pdf(e))) return e;
  }
  return std::nullopt;
}

} // namespace

P1Evidence check_p1(const NoiseFamily& family, double c0, std::span<const double> xi_grid,
                    std::span<const double> x_grid) {
  P1Evidence ev;
  ev.c0 = c0;
  ev.unimodal_check = true;
  ev.nonnegative_check = true;
  std::vector<double> xis(xi_grid.begin(), xi_grid.end());
  std::stable_sort(xis.begin(), xis.end(),
                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  double min_in = HUGE_VAL;

  for (double x : x_grid) {
    const auto& law = family.at(x);
    const double R = law.support_bound() ? *law.support_bound() : law.tail_radius(1e-6);
    if (auto w = asymmetry_witness(law, R)) {
      ev.ok = false;
      ev.witness_e = *w;
      ev.witness_x = x;
      ev.reason = "density is not symmetric";
      return ev;
    }
    for (double xi : xis) {
      const double v = law.char_fn(xi).real();
      if (std::abs(xi) <= c0) min_in = std::min(min_in, v);
      if (v < -1e-12 && ev.nonnegative_check) {
        ev.nonnegative_check = false;
        ev.witness_xi = xi;
        ev.witness_x = x;
        ev.reason = "characteristic function is negative";
      }
    }
    // Unimodality: first differences change sign at most once.
    constexpr int kGrid = 4096;
    int sign = 0, changes = 0;
    double prev = law.pdf(-R);
    for (int i = 1; i < kGrid; ++i) {
      const double e = -R + 2.0 * R * i / (kGrid - 1);
      const double cur = law.pdf(e);
      const double d = cur - prev;
      prev = cur;
      if (std::abs(d) <= 1e-14) continue;
      const int s = d > 0 ? 1 : -1;
      if (sign != 0 && s != sign) {
        ++changes;
        if (changes > 1 || s > 0) {
          if (ev.unimodal_check) {
            ev.unimodal_check = false;
            ev.witness_e = e;
            ev.witness_x = x;
            if (ev.reason.empty()) ev.reason = "density is not unimodal";
          }
          break;
        }
      }
      sign = s;
    }
  }
  ev.grid_min_charfn = min_in;
  ev.C0 = min_in;
  ev.ok = ev.nonnegative_check && ev.unimodal_check && min_in > 0.0;
  if (!ev.ok && ev.reason.empty()) ev.reason = "characteristic function not bounded below on [-c0, c0]";
  return ev;
}

P2Evidence check_p2(const NoiseFamily& family, std::span<const double> x_grid) {
  P2Evidence ev;
  constexpr double kScan = 10.0;
  constexpr int kGrid = 20000;
  double support = 0.0;
  for (double x : x_grid) {
    const auto& law = family.at(x);
    if (auto w = asymmetry_witness(law, kScan)) {
      ev.witness_e = *w;
      ev.witness_x = x;
      ev.reason = "density is not symmetric";
      return ev;
    }
    for (int i = kGrid; i >= 0; --i) {
      const double e = kScan * i / kGrid;
      if (law.pdf(e) > 0.0 || law.pdf(-e) > 0.0) {
        if (i == kGrid) {
          ev.witness_e = e;
          ev.witness_x = x;
          ev.reason = "density does not vanish on the scan range";
          return ev;
        }
        support = std::max(support, e);
        break;
      }
    }
  }
  ev.ok = true;
  ev.support = support;
  return ev;
}

} // namespace mee
