#include "mee/oracle.hpp"

#include "mee/errors.hpp"
#include "mee/quadrature.hpp"
#include "mee/special.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mee {
namespace {

constexpr double kPi = std::numbers::pi;

void check_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidBandwidth(h);
}

void tag_report(EntropyReport& r, const RegressionModel& model, const Hypothesis& f) {
  r.model_id = model.id;
  r.space = f.space.name();
  r.hypothesis_params = f.theta;
}

std::vector<double> oscillation_edges(double a, double b, double freq) {
  std::vector<double> pts{a};
  if (freq > 0.0) {
    double step = kPi / freq;
    if ((b - a) / step > 2e5) step = (b - a) / 2e5;
    for (double t = a + step; t < b; t += step) pts.push_back(t);
  }
  pts.push_back(b);
  return pts;
}

double shift_spread(const ErrorMixture& mix) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const auto& c : mix.parts) {
    lo = std::min(lo, c.shift);
    hi = std::max(hi, c.shift);
  }
  return hi - lo;
}

// int_0^X |p^_E|^2 dxi; the frequency of oscillation is set by the spread of
// shifts plus the width of the densities.
quad::Result char_square_core(const ErrorMixture& mix, double X, double extra_freq,
                              double weight_h = 0.0) {
  const auto pts = oscillation_edges(0.0, X, shift_spread(mix) + extra_freq);
  return quad::integrate_partitioned(
      [&](double xi) {
        const double damp = weight_h > 0.0 ? std::exp(-0.5 * weight_h * weight_h * xi * xi) : 1.0;
        return std::norm(mix.char_fn(xi)) * damp;
      },
      pts, {1e-12, 1e-13, 4'000'000});
}

// Jumps of a step mixture as sorted (position, signed size) pairs; positions
// are mirrored, which leaves every pairwise distance unchanged.
std::vector<std::pair<double, double>> step_jumps(const ErrorMixture& mix) {
  std::vector<std::pair<double, double>> terms;
  for (const auto& c : mix.parts) {
    for (const auto& p : *c.law->as_step()) {
      terms.push_back({c.shift - p.lo, c.w * p.height});
      terms.push_back({c.shift - p.hi, -c.w * p.height});
    }
  }
  std::sort(terms.begin(), terms.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first) merged.back().second += t.second;
    else merged.push_back(t);
  }
  return merged;
}

// Exact int_X^inf |p^_E|^2 for mixtures of step densities. With
// xi p^_E(xi) = -i sum_j r_j exp(i xi s_j), the tail is
// sum_{j,l} r_j r_l int_X^inf cos(xi (s_j - s_l)) / xi^2.
double step_char_square_tail(const ErrorMixture& mix, double X) {
  const auto jumps = step_jumps(mix);
  std::complex<double> phase_sum;
  for (const auto& [s, r] : jumps) phase_sum += r * std::complex<double>(std::cos(X * s), std::sin(X * s));
  double si_part = 0.0;
  for (std::size_t j = 0; j < jumps.size(); ++j) {
    double row = 0.0;
    for (std::size_t l = j + 1; l < jumps.size(); ++l) {
      const double a = jumps[l].first - jumps[j].first;
      row += jumps[l].second * a * special::sine_integral_complement_fast(a * X);
    }
    si_part += jumps[j].second * row;
  }
  return std::norm(phase_sum) / X - 2.0 * si_part;
}

// int int p_E(a) p_E(b) G_h(a - b) for a step mixture: integrating by parts
// twice against the jumps gives -h sum_{j,l} r_j r_l psi((s_j - s_l) / h),
// psi(z) = z (Phi(z) - 1/2) + phi(z).
double step_smoothed_square(const ErrorMixture& mix, double h) {
  const auto jumps = step_jumps(mix);
  double diag = 0.0, off = 0.0;
  for (std::size_t j = 0; j < jumps.size(); ++j) {
    diag += jumps[j].second * jumps[j].second;
    double row = 0.0;
    for (std::size_t l = j + 1; l < jumps.size(); ++l) {
      const double z = (jumps[l].first - jumps[j].first) / h;
      const double psi = z > 38.0 ? 0.5 * z
                                  : z * (0.5 - 0.5 * std::erfc(z * std::numbers::sqrt2 / 2.0)) +
                                        special::normal_pdf(z);
      row += jumps[l].second * psi;
    }
    off += jumps[j].second * row;
  }
  return -h * (diag * special::kInvSqrt2Pi + 2.0 * off);
}

} // namespace

// ---------------------------------------------------------------- report

EntropyReport EntropyReport::make(double V, std::string method, double err) {
  EntropyReport r;
  r.V = V;
  r.R = -std::log(-V);
  r.method = std::move(method);
  r.est_abs_error = err;
  return r;
}

std::string EntropyReport::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["value"] = V;
  j["R"] = R;
  j["est_abs_error"] = est_abs_error;
  j["converged"] = converged;
  j["model_id"] = model_id;
  j["space"] = space;
  j["hypothesis_params"] = hypothesis_params;
  return j.dump();
}

// ---------------------------------------------------------------- mixture

ErrorMixture::ErrorMixture(const RegressionModel& model, const Hypothesis& f, std::size_t nodes,
                           std::size_t panels) {
  if (panels == 0) panels = model.noise.all_step() ? kStepPanels : 1;
  for (const auto& node : model.marginal.nodes(nodes, panels)) {
    const double d = f(node.x) - model.f_star(node.x);
    const NoiseDensity* law = &model.noise.at(node.x);
    if (!parts.empty() && parts.back().shift == d && parts.back().law == law) {
      parts.back().w += node.w;
    } else {
      parts.push_back({node.w, d, law});
    }
  }
}

double ErrorMixture::pdf(double e) const {
  double s = 0.0;
  for (const auto& c : parts) s += c.w * c.law->pdf(e + c.shift);
  return s;
}

std::complex<double> ErrorMixture::char_fn(double xi) const {
  std::complex<double> s;
  for (const auto& c : parts)
    s += c.w * std::complex<double>(std::cos(xi * c.shift), std::sin(xi * c.shift)) *
         c.law->char_fn(xi);
  return s;
}

std::vector<double> ErrorMixture::breakpoints() const {
  std::vector<double> out;
  for (const auto& c : parts)
    for (double b : c.law->breakpoints()) out.push_back(b - c.shift);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<double> ErrorMixture::step_square_integral() const {
  // Sweep the sorted box edges; p_E is constant in between.
  std::vector<std::pair<double, double>> events;
  for (const auto& c : parts) {
    const auto* boxes = c.law->as_step();
    if (!boxes) return std::nullopt;
    for (const auto& b : *boxes) {
      events.push_back({b.lo - c.shift, c.w * b.height});
      events.push_back({b.hi - c.shift, -c.w * b.height});
    }
  }
  std::sort(events.begin(), events.end());
  double level = 0.0, total = 0.0;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    level += events[i].second;
    total += level * level * (events[i + 1].first - events[i].first);
  }
  return total;
}

std::pair<double, double> ErrorMixture::range(double mass) const {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const auto& c : parts) {
    const double R = c.law->support_bound() ? *c.law->support_bound() : c.law->tail_radius(mass);
    lo = std::min(lo, -R - c.shift);
    hi = std::max(hi, R - c.shift);
  }
  return {lo, hi};
}

double error_density(const RegressionModel& model, const Hypothesis& f, double e) {
  return ErrorMixture(model, f).pdf(e);
}

// ---------------------------------------------------------------- V

EntropyReport v_functional(const RegressionModel& model, const Hypothesis& f) {
  const ErrorMixture mix(model, f);
  if (const auto exact = mix.step_square_integral()) {
    auto rep = EntropyReport::make(-*exact, "quadrature", 1e-15 * *exact);
    tag_report(rep, model, f);
    return rep;
  }
  const bool heavy = model.noise.heavy_tailed();
  const double tol = heavy ? 1e-6 : 1e-9;
  const double mass = heavy ? 1e-7 : 1e-13;
  const auto [lo, hi] = mix.range(mass);
  const auto bps = mix.breakpoints();
  const auto pts = quad::make_partition(lo, hi, bps, 1.0);
  const auto r = quad::integrate_partitioned(
      [&](double e) {
        const double p = mix.pdf(e);
        return p * p;
      },
      pts, {0.01 * tol, 0.0, 2'000'000});
  const double truncation = model.noise.support_bound() ? 0.0 : model.noise.pdf_bound() * mass;
  auto rep = EntropyReport::make(-r.value, "quadrature", r.abs_error + truncation);
  rep.converged = r.converged && rep.est_abs_error <= tol;
  tag_report(rep, model, f);
  return rep;
}

EntropyReport v_fourier(const RegressionModel& model, const Hypothesis& f) {
  const ErrorMixture mix(model, f);
  double core_end, tail, tail_err = 0.0, width = 0.0;
  if (model.noise.all_step()) {
    for (const auto& b : model.noise.branches()) width = std::max(width, 2.0 * *b.law->support_bound());
    core_end = 20.0;
    tail = step_char_square_tail(mix, core_end);
  } else {
    core_end = 1.0;
    auto worst_tail = [&](double X) {
      double t = 0.0;
      for (const auto& b : model.noise.branches()) t = std::max(t, b.law->char_sq_tail(X));
      return t;
    };
    while (worst_tail(core_end) > 1e-12 && core_end < 1e7) core_end *= 2.0;
    tail = 0.0;
    tail_err = worst_tail(core_end);
  }
  const auto core = char_square_core(mix, core_end, width);
  auto rep = EntropyReport::make(-(core.value + tail) / kPi, "plancherel",
                                 (core.abs_error + tail_err) / kPi);
  rep.converged = core.converged;
  tag_report(rep, model, f);
  return rep;
}

EntropyReport v_plancherel_homoskedastic(const RegressionModel& model, const Hypothesis& f) {
  if (!model.homoskedastic())
    throw InvalidModel("plancherel route needs a homoskedastic model; '" + model.id + "' is not");
  return v_fourier(model, f);
}

// ---------------------------------------------------------------- E_h

double info_error_fourier(const RegressionModel& model, const Hypothesis& f, double h) {
  check_h(h);
  const ErrorMixture mix(model, f);
  const double X = std::sqrt(2.0 * 40.0) / h;
  double width = 0.0;
  if (auto s = model.noise.support_bound()) width = 2.0 * *s;
  const auto core = char_square_core(mix, X, width, h);
  return -core.value / kPi;
}

double info_error_true(const RegressionModel& model, const Hypothesis& f, double h) {
  check_h(h);
  const bool closed = std::all_of(model.noise.branches().begin(), model.noise.branches().end(),
                                  [](const auto& b) { return b.law->closed_smoothing(); });
  if (!closed) return info_error_fourier(model, f, h);
  const ErrorMixture mix(model, f);
  if (model.noise.all_step()) return -step_smoothed_square(mix, h);
  const auto [lo, hi] = mix.range(1e-13);
  const auto pts = quad::make_partition(lo, hi, mix.breakpoints(), 1.0);
  const auto r = quad::integrate_partitioned(
      [&](double e) {
        const double p = mix.pdf(e);
        if (p == 0.0) return 0.0;
        double q = 0.0;
        for (const auto& c : mix.parts) q += c.w * c.law->smoothed_pdf(e + c.shift, h);
        return p * q;
      },
      pts, {1e-12, 0.0, 2'000'000});
  if (!r.converged && r.abs_error > 1e-9)
    throw QuadratureError("info_error_true", r.abs_error, 1e-9);
  return -r.value;
}

// ---------------------------------------------------------------- bounds

ApproxErrorCheck approx_error_bound_check(const RegressionModel& model,
                                          const std::vector<Hypothesis>& f_set, double h) {
  check_h(h);
  ApproxErrorCheck out;
  for (const auto& f : f_set) {
    const double gap = std::abs(info_error_true(model, f, h) - v_functional(model, f).V);
    out.A_h_est = std::max(out.A_h_est, gap);
  }
  if (auto d = model.noise.deriv_bound()) out.bound = *d * h;
  return out;
}

Bracket bl_bu_bracket(const RegressionModel& model, const std::vector<Hypothesis>& f_grid) {
  if (f_grid.empty()) throw InvalidInput("bl_bu_bracket: empty hypothesis grid");
  Bracket b{HUGE_VAL, 0.0};
  for (const auto& f : f_grid) {
    const double a = -v_functional(model, f).V;
    b.B_L = std::min(b.B_L, a);
    b.B_U = std::max(b.B_U, a);
  }
  if (!(b.B_L > 0.0)) throw Error("bl_bu_bracket: B_L is not positive");
  if (b.B_U > model.noise.pdf_bound() * (1.0 + 1e-12))
    throw Error("bl_bu_bracket: B_U exceeds the density bound");
  return b;
}

VarianceIdentity variance_identity(const RegressionModel& model, const Hypothesis& f) {
  const auto nodes = model.marginal.nodes(kMarginalNodes);
  std::vector<double> d(nodes.size());
  double mean = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    d[k] = f(nodes[k].x) - model.f_star(nodes[k].x);
    mean += nodes[k].w * d[k];
  }
  VarianceIdentity out;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    double row = 0.0;
    for (std::size_t l = 0; l < nodes.size(); ++l) {
      const double diff = d[k] - d[l];
      row += nodes[l].w * diff * diff;
    }
    out.double_integral += nodes[k].w * row;
    out.twice_centered += 2.0 * nodes[k].w * (d[k] - mean) * (d[k] - mean);
  }
  return out;
}

// ---------------------------------------------------------------- fixed-h theory

double p1_curvature_integral(double M, double c0, double h) {
  if (!(h >= 0.0)) throw InvalidBandwidth(h);
  const double a = std::min(kPi / (4.0 * M), c0);
  const auto r = quad::integrate(
      [&](double xi) { return xi * xi * std::exp(-0.5 * h * h * xi * xi); }, 0.0, a,
      {1e-15, 1e-14, 100000});
  return 2.0 * r.value;
}

double p1_convergence_constant(const RegressionModel& model, const P1Evidence& evidence, double h) {
  if (!model.noise.has(NoiseTag::p1)) throw InvalidModel("model '" + model.id + "' is not tagged P1");
  if (!evidence.ok || !(evidence.C0 > 0.0) || !(evidence.c0 > 0.0))
    throw InvalidModel("P1 evidence missing or failed for '" + model.id + "'");
  const double ch = p1_curvature_integral(model.M, evidence.c0, h);
  return kPi * kPi * kPi / (2.0 * ch * evidence.C0);
}

double difference_density(const RegressionModel& model, double x, double u, double w) {
  const auto& px = model.noise.at(x);
  const auto& pu = model.noise.at(u);
  const double R = pu.support_bound() ? *pu.support_bound() : pu.tail_radius(1e-13);
  std::vector<double> bps = pu.breakpoints();
  for (double b : px.breakpoints()) bps.push_back(b - w);
  const auto pts = quad::make_partition(-R, R, bps, 0.0);
  return quad::integrate_partitioned([&](double v) { return px.pdf(w + v) * pu.pdf(v); }, pts,
                                     {1e-15, 1e-13, 400000})
      .value;
}

namespace {

struct CurvatureSetup {
  double Mt;
  std::vector<double> pts;
};

CurvatureSetup curvature_setup(const RegressionModel& model, double x, double u, double t) {
  if (!model.noise.has(NoiseTag::p2)) throw InvalidModel("model '" + model.id + "' is not tagged P2");
  const auto Mt = model.noise.support_bound();
  if (!Mt) throw InvalidModel("P2 model without a support bound");
  if (std::abs(t) > 4.0 * model.M * (1.0 + 1e-12))
    throw InvalidInput("p2_curvature: |t| must be <= 4M");
  std::vector<double> kinks;
  for (double bx : model.noise.at(x).breakpoints())
    for (double bu : model.noise.at(u).breakpoints()) kinks.push_back(bx - bu);
  return {*Mt, quad::make_partition(-2.0 * *Mt, 2.0 * *Mt, kinks, 0.0)};
}

} // namespace

double p2_slope(const RegressionModel& model, double x, double u, double t, double h) {
  check_h(h);
  const auto s = curvature_setup(model, x, u, t);
  const auto r = quad::integrate_partitioned(
      [&](double w) {
        const double z = w - t;
        return std::exp(-z * z / (2.0 * h * h)) * (z / (h * h)) * difference_density(model, x, u, w);
      },
      s.pts, {1e-15, 1e-12, 400000});
  return -r.value;
}

Curvature p2_curvature(const RegressionModel& model, double x, double u, double t, double h) {
  check_h(h);
  const auto s = curvature_setup(model, x, u, t);
  const auto r = quad::integrate_partitioned(
      [&](double w) {
        const double z = w - t;
        return std::exp(-z * z / (2.0 * h * h)) * (z * z / (h * h) - 1.0) *
               difference_density(model, x, u, w);
      },
      s.pts, {1e-15, 1e-12, 400000});
  Curvature c;
  c.second = -r.value / (h * h);
  c.first = p2_slope(model, x, u, t, h);
  c.threshold = 4.0 * model.M + 2.0 * s.Mt;
  if (h > c.threshold) {
    const double q = 2.0 * model.M + s.Mt;
    c.lower_bound = (1.0 / (h * h)) * (1.0 - c.threshold * c.threshold / (h * h)) *
                    std::exp(-2.0 * q * q / (h * h));
  }
  return c;
}

} // namespace mee
