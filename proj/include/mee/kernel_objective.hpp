#pragma once

#include "mee/hypothesis.hpp"

#include <span>
#include <string>
#include <vector>

namespace mee {

/// Observations (x_i, y_i), scalar input.
struct Dataset {
  std::vector<double> x, y;
  std::size_t size() const { return x.size(); }
};

/// Pair sums above this size log a one-time warning (cost is exact O(n^2)).
inline constexpr std::size_t kPairSumWarnSize = 200'000;
/// Rows per parallel work item; the reduction runs over blocks in order.
inline constexpr std::size_t kRowBlock = 256;

/// G_h(t) = exp(-t^2 / 2h^2) / (sqrt(2 pi) h).
double gaussian_kernel(double t, double h);

/// (1/n) sum_j G_h(e - e_j).
double kde_at(std::span<const double> errors, double h, double e);

/// e_i = y_i - f(x_i).
std::vector<double> residuals(const Hypothesis& f, const Dataset& data);

/// -(1/n^2) sum_i sum_j G_h(e_i - e_j), diagonal included.
double empirical_info_error(std::span<const double> errors, double h);
double empirical_info_error(const Hypothesis& f, const Dataset& data, double h);

/// -log(-empirical_info_error).
double empirical_renyi(const Hypothesis& f, const Dataset& data, double h);

struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Value and parameter gradient in one pass over the pairs.
ObjectiveValue info_error_with_gradient(const Hypothesis& f, const Dataset& data, double h);
std::vector<double> grad_info_error(const Hypothesis& f, const Dataset& data, double h);

/// b_z = (1/n) sum_i (y_i - f(x_i)).
double constant_adjustment(const Hypothesis& f, const Dataset& data);

/// CSV with header "x,y".
Dataset read_dataset_csv(const std::string& path);
Dataset parse_dataset_csv(const std::string& text);
void write_dataset_csv(const std::string& path, const Dataset& data);
/// CSV with header "i,e_i".
void write_residuals_csv(const std::string& path, std::span<const double> errors);

} // namespace mee
