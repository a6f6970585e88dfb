#pragma once

#include <span>
#include <string>
#include <vector>

namespace mee {

struct Interval {
  double lo, hi;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Input domain: a union of disjoint closed intervals in increasing order.
struct Domain {
  std::vector<Interval> pieces;
  double lo() const { return pieces.front().lo; }
  double hi() const { return pieces.back().hi; }
  bool contains(double x) const;
  /// Index of the piece containing x, or -1.
  int piece_of(double x) const;
};

enum class SpaceKind { constant, piecewise_constant, bins, cosine, hat, poly, linear };

/// A finite-dimensional linear space f = sum_j theta_j phi_j(x) with fixed
/// bounded basis functions, plus the rule that keeps sup|f| <= M.
///
///   constant            phi = 1
///   piecewise_constant  indicators of the domain pieces
///   bins:K              indicators of K equal bins of [lo, hi]
///   cosine:K            cos(j pi (x - lo)/(hi - lo)), j = 1..K (no intercept)
///   hat:K               K >= 2 hat functions on equally spaced knots
///   poly:K              u^j, j = 0..K, u = 2(x - lo)/(hi - lo) - 1
///   linear              phi = x
///
/// Indicator and hat spaces are kept bounded by clamping |theta_j| <= M
/// (their bases are partitions of unity); the others by rescaling theta
/// when sum_j |theta_j| sup|phi_j| exceeds M.
class HypothesisSpace {
public:
  HypothesisSpace() = default;
  HypothesisSpace(SpaceKind kind, int order, Domain domain);

  /// Parses "constant", "piecewise_constant", "bins:K", "cosine:K", "hat:K",
  /// "poly:K" or "linear".
  static HypothesisSpace parse(const std::string& desc, const Domain& domain);

  std::string name() const;
  SpaceKind kind() const { return kind_; }
  int order() const { return order_; }
  const Domain& domain() const { return domain_; }
  std::size_t dim() const { return dim_; }

  void basis(double x, std::span<double> out) const;
  double basis_sup(std::size_t j) const;
  bool uses_box() const;
  /// True when the constant function lies in the space.
  bool has_intercept() const;

  void project(std::span<double> theta, double M) const;
  bool feasible(std::span<const double> theta, double M, double slack = 1e-12) const;

  double value(std::span<const double> theta, double x) const;

private:
  SpaceKind kind_ = SpaceKind::constant;
  int order_ = 0;
  Domain domain_;
  std::size_t dim_ = 1;
};

/// f_theta together with its space and bound.
struct Hypothesis {
  HypothesisSpace space;
  std::vector<double> theta;
  double M = 1.0;

  double operator()(double x) const { return space.value(theta, x); }
  /// Same function shifted by a constant; only valid for spaces with an
  /// intercept or for piecewise-constant spaces.
  Hypothesis shifted(double b) const;
};

} // namespace mee
