#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace mee::quad {

struct Options {
  double abs_tol = 1e-9;
  double rel_tol = 0.0;
  std::size_t max_evals = 1'000'000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;

  Result& operator+=(const Result& o) {
    value += o.value;
    abs_error += o.abs_error;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
  }
};

namespace detail {

// Gauss-Kronrod 7/15 on [-1, 1], outermost node first, centre last.
struct Gk15Table {
  std::array<double, 8> xgk{}, wgk{};
  std::array<double, 4> wg{};
  Gk15Table() {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& x = gauss_kronrod<double, 15>::abscissa();
    const auto& wk = gauss_kronrod<double, 15>::weights();
    const auto& w = gauss<double, 7>::weights();
    for (std::size_t j = 0; j < 8; ++j) {
      xgk[j] = x[7 - j];
      wgk[j] = wk[7 - j];
    }
    for (std::size_t j = 0; j < 4; ++j) wg[j] = w[3 - j];
  }
};

inline const Gk15Table& gk15_table() {
  static const Gk15Table table;
  return table;
}

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const auto& [kXgk, kWgk, kWg] = gk15_table();
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = r * kXgk[j];
    const double fs = f(c - dx) + f(c + dx);
    kronrod += kWgk[j] * fs;
    if (j % 2 == 1) gauss += kWg[j / 2] * fs;
  }
  return {a, b, kronrod * r, std::abs((kronrod - gauss) * r)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod integration over [points[0], points.back()],
/// with the initial partition given by `points` (sorted breakpoints where the
/// integrand may be discontinuous or kinked).
template <class F>
Result integrate_partitioned(F&& f, std::span<const double> points, const Options& opt = {}) {
  Result res;
  if (points.size() < 2) return res;
  std::priority_queue<detail::Segment> heap;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    auto s = detail::gk15(f, points[i], points[i + 1]);
    res.evaluations += 15;
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }
  while (!heap.empty()) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (total_err <= tol) break;
    if (res.evaluations + 30 > opt.max_evals) {
      res.converged = false;
      break;
    }
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval exhausted at machine precision; accept as is.
      res.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    res.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to limit cancellation drift from the running updates.
  double v = 0.0, e = 0.0;
  std::vector<detail::Segment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  for (const auto& s : segs) {
    v += s.value;
    e += s.error;
  }
  res.value = v;
  res.abs_error = e;
  return res;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  const double pts[2] = {a, b};
  return integrate_partitioned(f, std::span<const double>(pts, 2), opt);
}

/// Sorted, de-duplicated partition of [a, b] containing every breakpoint that
/// falls strictly inside, plus geometric panel edges when the range is wide
/// (so heavy tails are resolved panel by panel).
std::vector<double> make_partition(double a, double b, std::span<const double> breakpoints,
                                   double core = 1.0);

/// Fixed n-point Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
public:
  explicit GaussLegendre(std::size_t n);
  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(c + r * nodes_[i]);
    return s * r;
  }

private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Cached rule; rules are built once per size and shared.
const GaussLegendre& gauss_legendre(std::size_t n);

} // namespace mee::quad
