#include "mee/kernel_objective.hpp"

#include "mee/errors.hpp"
#include "mee/parallel.hpp"
#include "mee/simd/kernels.hpp"
#include "mee/special.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mee {
namespace {

void check_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidBandwidth(h);
}

void warn_if_large(std::size_t n) {
  static std::atomic<bool> warned{false};
  if (n > kPairSumWarnSize && !warned.exchange(true))
    std::cerr << "mee: warning: exact O(n^2) pair sum with n=" << n << "\n";
}

// Row sums of exp(-(e_i - e_j)^2 / 2h^2) and, if asked, of
// (e_i - e_j) exp(...), computed in fixed row blocks.
void pair_row_sums(std::span<const double> e, double h, std::vector<double>& k,
                   std::vector<double>* w) {
  const std::size_t n = e.size();
  warn_if_large(n);
  k.assign(n, 0.0);
  if (w) w->assign(n, 0.0);
  const double inv_2h2 = 1.0 / (2.0 * h * h);
  const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
  const simd::Isa isa = simd::active();
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t lo = b * kRowBlock;
    const std::size_t len = std::min(kRowBlock, n - lo);
    std::span<double> ws = w ? std::span<double>(w->data() + lo, len) : std::span<double>();
    simd::gauss_row_sums(isa, e.subspan(lo, len), e, inv_2h2,
                         std::span<double>(k.data() + lo, len), ws);
  });
}

double ordered_sum(const std::vector<double>& v) {
  // Sum of block partials, blocks in index order.
  double total = 0.0;
  for (std::size_t lo = 0; lo < v.size(); lo += kRowBlock) {
    double part = 0.0;
    const std::size_t hi = std::min(v.size(), lo + kRowBlock);
    for (std::size_t i = lo; i < hi; ++i) part += v[i];
    total += part;
  }
  return total;
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

} // namespace

double gaussian_kernel(double t, double h) {
  check_h(h);
  return special::kInvSqrt2Pi / h * std::exp(-t * t / (2.0 * h * h));
}

double kde_at(std::span<const double> errors, double h, double e) {
  check_h(h);
  if (errors.empty()) throw InvalidInput("kde_at: empty error vector");
  double s = 0.0;
  for (double ej : errors) s += gaussian_kernel(e - ej, h);
  return s / static_cast<double>(errors.size());
}

std::vector<double> residuals(const Hypothesis& f, const Dataset& data) {
  std::vector<double> e(data.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = data.y[i] - f(data.x[i]);
  return e;
}

double empirical_info_error(std::span<const double> errors, double h) {
  check_h(h);
  if (errors.empty()) throw InvalidInput("empirical_info_error: empty sample");
  std::vector<double> k;
  pair_row_sums(errors, h, k, nullptr);
  const double n = static_cast<double>(errors.size());
  return -special::kInvSqrt2Pi / h * ordered_sum(k) / (n * n);
}

double empirical_info_error(const Hypothesis& f, const Dataset& data, double h) {
  check_h(h);
  return empirical_info_error(residuals(f, data), h);
}

double empirical_renyi(const Hypothesis& f, const Dataset& data, double h) {
  return -std::log(-empirical_info_error(f, data, h));
}

ObjectiveValue info_error_with_gradient(const Hypothesis& f, const Dataset& data, double h) {
  check_h(h);
  const std::size_t n = data.size();
  if (n == 0) throw InvalidInput("info_error_with_gradient: empty sample");
  const auto e = residuals(f, data);
  std::vector<double> k, w;
  pair_row_sums(e, h, k, &w);
  const double nn = static_cast<double>(n);
  const double c = special::kInvSqrt2Pi / h;

  ObjectiveValue out;
  out.value = -c * ordered_sum(k) / (nn * nn);

  // dE/dtheta = -(2c / (n^2 h^2)) sum_i W_i (phi(x_i) - mean phi), with
  // W_i = sum_j (e_i - e_j) exp(-(e_i - e_j)^2 / 2h^2).
  const std::size_t d = f.space.dim();
  std::vector<double> phi(d), mean(d, 0.0), acc(d, 0.0);
  std::vector<double> basis_all(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    f.space.basis(data.x[i], std::span<double>(basis_all.data() + i * d, d));
  }
  for (std::size_t lo = 0; lo < n; lo += kRowBlock) {
    std::vector<double> part(d, 0.0);
    for (std::size_t i = lo; i < std::min(n, lo + kRowBlock); ++i)
      for (std::size_t j = 0; j < d; ++j) part[j] += basis_all[i * d + j];
    for (std::size_t j = 0; j < d; ++j) mean[j] += part[j];
  }
  for (double& m : mean) m /= nn;
  for (std::size_t lo = 0; lo < n; lo += kRowBlock) {
    std::vector<double> part(d, 0.0);
    for (std::size_t i = lo; i < std::min(n, lo + kRowBlock); ++i)
      for (std::size_t j = 0; j < d; ++j) part[j] += w[i] * (basis_all[i * d + j] - mean[j]);
    for (std::size_t j = 0; j < d; ++j) acc[j] += part[j];
  }
  const double scale = -2.0 * c / (nn * nn * h * h);
  out.gradient.resize(d);
  for (std::size_t j = 0; j < d; ++j) out.gradient[j] = scale * acc[j];
  return out;
}

std::vector<double> grad_info_error(const Hypothesis& f, const Dataset& data, double h) {
  return info_error_with_gradient(f, data, h).gradient;
}

double constant_adjustment(const Hypothesis& f, const Dataset& data) {
  if (data.size() == 0) throw InvalidInput("constant_adjustment: empty sample");
  const auto e = residuals(f, data);
  double s = 0.0;
  for (double v : e) s += v;
  return s / static_cast<double>(e.size());
}

Dataset parse_dataset_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Dataset d;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "x,y") throw InvalidInput("dataset: expected header 'x,y' on line 1");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    double x, y;
    if (comma == std::string::npos || !parse_double(std::string_view(line).substr(0, comma), x) ||
        !parse_double(std::string_view(line).substr(comma + 1), y))
      throw InvalidInput("dataset: malformed row on line " + std::to_string(lineno));
    d.x.push_back(x);
    d.y.push_back(y);
  }
  if (!header) throw InvalidInput("dataset: missing header 'x,y'");
  return d;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset_csv(ss.str());
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset", path);
  out << "x,y\n";
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", data.x[i], data.y[i]);
    out << buf;
  }
  if (!out) throw IoError("write failed", path);
}

void write_residuals_csv(const std::string& path, std::span<const double> errors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write residuals", path);
  out << "i,e_i\n";
  char buf[64];
  for (std::size_t i = 0; i < errors.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, errors[i]);
    out << buf;
  }
  if (!out) throw IoError("write failed", path);
}

} // namespace mee
