#include "mee/model.hpp"

#include "mee/errors.hpp"
#include "mee/kernel_objective.hpp"
#include "mee/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace mee {

Marginal::Marginal(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw InvalidModel("marginal needs at least one interval");
  double mass = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.span.hi > p.span.lo) || !(p.mass > 0.0))
      throw InvalidModel("marginal: each interval needs lo < hi and positive mass");
    if (i > 0 && !(p.span.lo > pieces_[i - 1].span.hi))
      throw InvalidModel("marginal: intervals must be disjoint and increasing");
    mass += p.mass;
  }
  if (std::abs(mass - 1.0) > 1e-12) throw InvalidModel("marginal: masses must sum to 1");
}

Domain Marginal::domain() const {
  Domain d;
  for (const auto& p : pieces_) d.pieces.push_back(p.span);
  return d;
}

double Marginal::density(double x) const {
  for (const auto& p : pieces_)
    if (p.span.contains(x)) return p.mass / p.span.length();
  return 0.0;
}

double Marginal::sample(Rng& rng) const {
  double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
    if (u < pieces_[i].mass) return pieces_[i].span.lo + pieces_[i].span.length() * (u / pieces_[i].mass);
    u -= pieces_[i].mass;
  }
  const auto& last = pieces_.back();
  return last.span.lo + last.span.length() * std::min(u / last.mass, 1.0);
}

std::vector<MarginalNode> Marginal::nodes(std::size_t per_piece, std::size_t panels) const {
  const auto& gl = quad::gauss_legendre(per_piece);
  panels = std::max<std::size_t>(panels, 1);
  std::vector<MarginalNode> out;
  out.reserve(per_piece * panels * pieces_.size());
  for (const auto& p : pieces_) {
    const double width = p.span.length() / static_cast<double>(panels);
    const double mass = p.mass / static_cast<double>(panels);
    for (std::size_t k = 0; k < panels; ++k) {
      const double a = p.span.lo + width * static_cast<double>(k);
      const double c = a + 0.5 * width, r = 0.5 * width;
      for (std::size_t i = 0; i < gl.size(); ++i)
        out.push_back({c + r * gl.nodes()[i], 0.5 * mass * gl.weights()[i]});
    }
  }
  return out;
}

HypothesisSpace RegressionModel::space(const std::string& desc) const {
  return HypothesisSpace::parse(desc.empty() ? default_space : desc, domain());
}

Dataset RegressionModel::sample(std::size_t n, Rng& rng) const {
  Dataset d;
  d.x.resize(n);
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = marginal.sample(rng);
    d.x[i] = x;
    d.y[i] = f_star(x) + sample_noise(noise, x, rng);
  }
  return d;
}

namespace {

double param(const ParamMap& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::string& id, const ParamMap& p,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : p) {
    (void)v;
    bool ok = k == "M";
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw InvalidModel("model '" + id + "' has no parameter '" + k + "'");
  }
}

RegressionModel homoskedastic_model(const std::string& id, const ParamMap& params, NoisePtr law,
                                    std::initializer_list<NoiseTag> tags) {
  RegressionModel m;
  m.id = id;
  m.params = params;
  m.M = param(params, "M", 1.0);
  m.marginal = Marginal({{{0.0, 1.0}, 1.0}});
  m.noise = NoiseFamily::homoskedastic(std::move(law));
  for (auto t : tags) m.noise.add_tag(t);
  m.default_space = "cosine:2";
  m.f_star = Hypothesis{HypothesisSpace(SpaceKind::cosine, 2, m.domain()), {0.5, -0.3}, m.M};
  if (!m.f_star.space.feasible(m.f_star.theta, m.M))
    throw InvalidModel("model '" + id + "': M too small for the regression function");
  return m;
}

} // namespace

RegressionModel make_model(const std::string& id, const ParamMap& params) {
  if (id == "counterexample") {
    reject_unknown(id, params, {});
    RegressionModel m;
    m.id = id;
    m.params = params;
    m.M = param(params, "M", 1.0);
    m.marginal = Marginal({{{0.0, 0.5}, 0.5}, {{1.0, 1.5}, 0.5}});
    m.noise = NoiseFamily::piecewise(
        {{0.0, 0.5, StepNoise::uniform(0.5)}, {1.0, 1.5, StepNoise::shell(0.5, 1.5)}});
    m.noise.add_tag(NoiseTag::p2);
    m.default_space = "piecewise_constant";
    m.f_star = Hypothesis{HypothesisSpace(SpaceKind::piecewise_constant, 0, m.domain()),
                          {0.0, 0.0}, m.M};
    m.exact_v_star = -5.0 / 8.0;
    return m;
  }
  if (id == "gaussian") {
    reject_unknown(id, params, {"sigma"});
    const double s = param(params, "sigma", 1.0);
    auto m = homoskedastic_model(id, params, std::make_shared<GaussianNoise>(s), {NoiseTag::p1});
    m.exact_v_star = -1.0 / (2.0 * s * std::sqrt(std::numbers::pi));
    return m;
  }
  if (id == "laplace") {
    reject_unknown(id, params, {"scale"});
    const double b = param(params, "scale", 1.0);
    auto m = homoskedastic_model(id, params, std::make_shared<LinnikNoise>(b, 2.0), {NoiseTag::p1});
    m.exact_v_star = -0.25 / b;
    return m;
  }
  if (id == "uniform") {
    reject_unknown(id, params, {"a"});
    const double a = param(params, "a", 0.5);
    auto m = homoskedastic_model(id, params, StepNoise::uniform(a), {NoiseTag::p2});
    m.exact_v_star = -0.5 / a;
    return m;
  }
  if (id == "cauchy") {
    reject_unknown(id, params, {"gamma"});
    const double g = param(params, "gamma", 1.0);
    auto m = homoskedastic_model(id, params, std::make_shared<StableNoise>(g, 1.0), {NoiseTag::p1});
    m.exact_v_star = -1.0 / (2.0 * std::numbers::pi * g);
    return m;
  }
  if (id == "stable") {
    reject_unknown(id, params, {"gamma", "alpha"});
    const double g = param(params, "gamma", 1.0), a = param(params, "alpha", 1.5);
    auto m = homoskedastic_model(id, params, std::make_shared<StableNoise>(g, a), {NoiseTag::p1});
    // int p^2 = (1/pi) int_0^inf exp(-2 (g xi)^a) dxi
    m.exact_v_star = -std::tgamma(1.0 + 1.0 / a) / (std::numbers::pi * g * std::pow(2.0, 1.0 / a));
    return m;
  }
  if (id == "linnik") {
    reject_unknown(id, params, {"lambda", "alpha"});
    const double l = param(params, "lambda", 1.0), a = param(params, "alpha", 1.5);
    auto m = homoskedastic_model(id, params, std::make_shared<LinnikNoise>(l, a), {NoiseTag::p1});
    m.exact_v_star = -m.noise.at(0.5).square_integral();
    return m;
  }
  if (id == "bimodal") {
    reject_unknown(id, params, {"inner", "outer"});
    const double in = param(params, "inner", 0.5), out = param(params, "outer", 1.5);
    auto law = StepNoise::shell(in, out);
    const double sq = law->square_integral();
    auto m = homoskedastic_model(id, params, std::move(law), {NoiseTag::p2});
    m.exact_v_star = -sq;
    return m;
  }
  throw InvalidModel("unknown model id '" + id + "'");
}

std::vector<std::string> registered_models() {
  return {"counterexample", "gaussian", "laplace", "uniform", "cauchy", "stable", "linnik", "bimodal"};
}

} // namespace mee
