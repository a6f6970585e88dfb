#include "mee/hypothesis.hpp"

#include "mee/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mee {

bool Domain::contains(double x) const { return piece_of(x) >= 0; }

int Domain::piece_of(double x) const {
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (pieces[i].contains(x)) return static_cast<int>(i);
  return -1;
}

HypothesisSpace::HypothesisSpace(SpaceKind kind, int order, Domain domain)
    : kind_(kind), order_(order), domain_(std::move(domain)) {
  if (domain_.pieces.empty()) throw InvalidHypothesis("hypothesis space needs a domain");
  switch (kind_) {
  case SpaceKind::constant:
  case SpaceKind::linear: dim_ = 1; break;
  case SpaceKind::piecewise_constant: dim_ = domain_.pieces.size(); break;
  case SpaceKind::bins:
  case SpaceKind::cosine:
    if (order_ < 1) throw InvalidHypothesis(name() + ": order must be >= 1");
    dim_ = static_cast<std::size_t>(order_);
    break;
  case SpaceKind::hat:
    if (order_ < 2) throw InvalidHypothesis(name() + ": order must be >= 2");
    dim_ = static_cast<std::size_t>(order_);
    break;
  case SpaceKind::poly:
    if (order_ < 0) throw InvalidHypothesis(name() + ": order must be >= 0");
    dim_ = static_cast<std::size_t>(order_) + 1;
    break;
  }
}

HypothesisSpace HypothesisSpace::parse(const std::string& desc, const Domain& domain) {
  const auto colon = desc.find(':');
  const std::string head = desc.substr(0, colon);
  int order = 0;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      order = std::stoi(desc.substr(colon + 1), &used);
      if (used != desc.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidHypothesis("bad space order in '" + desc + "'");
    }
  }
  auto need_order = [&] {
    if (colon == std::string::npos) throw InvalidHypothesis("space '" + desc + "' needs :K");
  };
  if (head == "constant") return {SpaceKind::constant, 0, domain};
  if (head == "piecewise_constant") return {SpaceKind::piecewise_constant, 0, domain};
  if (head == "linear") return {SpaceKind::linear, 0, domain};
  if (head == "bins") return need_order(), HypothesisSpace{SpaceKind::bins, order, domain};
  if (head == "cosine") return need_order(), HypothesisSpace{SpaceKind::cosine, order, domain};
  if (head == "hat") return need_order(), HypothesisSpace{SpaceKind::hat, order, domain};
  if (head == "poly") return need_order(), HypothesisSpace{SpaceKind::poly, order, domain};
  throw InvalidHypothesis("unknown space kind '" + desc + "'");
}

std::string HypothesisSpace::name() const {
  switch (kind_) {
  case SpaceKind::constant: return "constant";
  case SpaceKind::piecewise_constant: return "piecewise_constant";
  case SpaceKind::linear: return "linear";
  case SpaceKind::bins: return "bins:" + std::to_string(order_);
  case SpaceKind::cosine: return "cosine:" + std::to_string(order_);
  case SpaceKind::hat: return "hat:" + std::to_string(order_);
  case SpaceKind::poly: return "poly:" + std::to_string(order_);
  }
  return "?";
}

void HypothesisSpace::basis(double x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const double lo = domain_.lo(), hi = domain_.hi();
  const double u = (x - lo) / (hi - lo);
  switch (kind_) {
  case SpaceKind::constant: out[0] = 1.0; break;
  case SpaceKind::linear: out[0] = x; break;
  case SpaceKind::piecewise_constant: {
    const int p = domain_.piece_of(x);
    if (p >= 0) out[static_cast<std::size_t>(p)] = 1.0;
    break;
  }
  case SpaceKind::bins: {
    const int k = std::clamp(static_cast<int>(std::floor(u * order_)), 0, order_ - 1);
    out[static_cast<std::size_t>(k)] = 1.0;
    break;
  }
  case SpaceKind::cosine:
    for (int j = 1; j <= order_; ++j)
      out[static_cast<std::size_t>(j - 1)] = std::cos(j * std::numbers::pi * u);
    break;
  case SpaceKind::hat: {
    const double s = std::clamp(u, 0.0, 1.0) * (order_ - 1);
    const int k = std::min(static_cast<int>(std::floor(s)), order_ - 2);
    const double r = s - k;
    out[static_cast<std::size_t>(k)] = 1.0 - r;
    out[static_cast<std::size_t>(k + 1)] = r;
    break;
  }
  case SpaceKind::poly: {
    const double t = 2.0 * u - 1.0;
    double p = 1.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      out[j] = p;
      p *= t;
    }
    break;
  }
  }
}

double HypothesisSpace::basis_sup(std::size_t) const {
  if (kind_ == SpaceKind::linear) return std::max(std::abs(domain_.lo()), std::abs(domain_.hi()));
  return 1.0;
}

bool HypothesisSpace::uses_box() const {
  return kind_ == SpaceKind::constant || kind_ == SpaceKind::piecewise_constant ||
         kind_ == SpaceKind::bins || kind_ == SpaceKind::hat;
}

bool HypothesisSpace::has_intercept() const {
  return kind_ != SpaceKind::cosine && kind_ != SpaceKind::linear;
}

void HypothesisSpace::project(std::span<double> theta, double M) const {
  if (uses_box()) {
    for (double& t : theta) t = std::clamp(t, -M, M);
    return;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) s += std::abs(theta[j]) * basis_sup(j);
  if (s > M) {
    const double k = M / s;
    for (double& t : theta) t *= k;
  }
}

bool HypothesisSpace::feasible(std::span<const double> theta, double M, double slack) const {
  if (uses_box())
    return std::all_of(theta.begin(), theta.end(),
                       [&](double t) { return std::abs(t) <= M + slack; });
  double s = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) s += std::abs(theta[j]) * basis_sup(j);
  return s <= M + slack;
}

double HypothesisSpace::value(std::span<const double> theta, double x) const {
  double phi[64];
  std::vector<double> big;
  std::span<double> out;
  if (dim_ <= 64) {
    out = std::span<double>(phi, dim_);
  } else {
    big.resize(dim_);
    out = big;
  }
  basis(x, out);
  double s = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) s += theta[j] * out[j];
  return s;
}

Hypothesis Hypothesis::shifted(double b) const {
  Hypothesis h = *this;
  switch (space.kind()) {
  case SpaceKind::constant:
  case SpaceKind::piecewise_constant:
  case SpaceKind::bins:
  case SpaceKind::hat:
    for (double& t : h.theta) t += b;
    break;
  case SpaceKind::poly: h.theta[0] += b; break;
  default: throw InvalidHypothesis(space.name() + " has no intercept to shift");
  }
  return h;
}

} // namespace mee
