#include "mee/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <map>
#include <memory>
#include <mutex>
#include <new>

namespace mee::quad {

std::vector<double> make_partition(double a, double b, std::span<const double> breakpoints,
                                   double core) {
  std::vector<double> pts;
  pts.reserve(breakpoints.size() + 64);
  pts.push_back(a);
  pts.push_back(b);
  for (double p : breakpoints)
    if (p > a && p < b) pts.push_back(p);

  // Geometric edges +-core*2^k so that wide (heavy-tailed) ranges are split
  // into panels of comparable relative width.
  if (core > 0.0) {
    for (double edge = core; edge < std::max(std::abs(a), std::abs(b)); edge *= 2.0) {
      if (edge > a && edge < b) pts.push_back(edge);
      if (-edge > a && -edge < b) pts.push_back(-edge);
    }
    if (0.0 > a && 0.0 < b) pts.push_back(0.0);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

GaussLegendre::GaussLegendre(std::size_t n) : nodes_(n), weights_(n) {
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
  if (!table) throw std::bad_alloc();
  for (std::size_t i = 0; i < n; ++i)
    gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes_[i], &weights_[i], table);
  gsl_integration_glfixed_table_free(table);
}

const GaussLegendre& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(n);
  return *slot;
}

} // namespace mee::quad
