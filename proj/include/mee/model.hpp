#pragma once

#include "mee/hypothesis.hpp"
#include "mee/noise_models.hpp"
#include "mee/rng.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mee {

using ParamMap = std::map<std::string, double>;

/// Quadrature node of the input marginal.
struct MarginalNode {
  double x, w;
};

/// Piecewise-uniform marginal over a union of disjoint intervals.
class Marginal {
public:
  struct Piece {
    Interval span;
    double mass;
  };

  Marginal() = default;
  explicit Marginal(std::vector<Piece> pieces);

  const std::vector<Piece>& pieces() const { return pieces_; }
  Domain domain() const;
  double density(double x) const;
  double sample(Rng& rng) const;
  /// Gauss-Legendre nodes: each interval split into `panels` equal panels
  /// of `per_piece` nodes.
  std::vector<MarginalNode> nodes(std::size_t per_piece = 64, std::size_t panels = 1) const;

private:
  std::vector<Piece> pieces_;
};

struct Dataset;

/// Ground truth Y = f*(X) + eps with X ~ marginal and eps | X ~ noise.
struct RegressionModel {
  std::string id;
  ParamMap params;
  Marginal marginal;
  NoiseFamily noise;
  double M = 1.0;
  Hypothesis f_star;
  std::string default_space;
  /// Exact minimum of V over all measurable f, when known in closed form.
  std::optional<double> exact_v_star;

  bool homoskedastic() const { return noise.is_homoskedastic(); }
  Domain domain() const { return marginal.domain(); }
  HypothesisSpace space(const std::string& desc) const;

  Dataset sample(std::size_t n, Rng& rng) const;
};

/// Registered model ids:
///   counterexample              two-interval heteroskedastic model, f* = 0
///   gaussian   (sigma)          homoskedastic models on [0, 1] with
///   laplace    (scale)          f* = 0.5 cos(pi x) - 0.3 cos(2 pi x)
///   uniform    (a)
///   cauchy     (gamma)
///   stable     (gamma, alpha)
///   linnik     (lambda, alpha)
///   bimodal    (inner, outer)   uniform on [-outer, -inner] U [inner, outer]
/// Every model also accepts M.
RegressionModel make_model(const std::string& id, const ParamMap& params = {});
std::vector<std::string> registered_models();

} // namespace mee
