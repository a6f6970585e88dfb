#include "mee/consistency_lab.hpp"

#include "mee/counterexample.hpp"
#include "mee/errors.hpp"
#include "mee/kernel_objective.hpp"
#include "mee/oracle.hpp"
#include "mee/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace mee {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kDataStream = 0x64617461ULL;
constexpr std::uint64_t kFitStream = 0x666974ULL;
constexpr std::uint64_t kConcStream = 0x636f6e63ULL;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

BandwidthSchedule BandwidthSchedule::power_law(double c, double theta) {
  BandwidthSchedule s;
  s.kind = Kind::power_law;
  s.c = c;
  s.theta = theta;
  return s;
}

BandwidthSchedule BandwidthSchedule::fixed(double h) {
  BandwidthSchedule s;
  s.kind = Kind::fixed;
  s.h = h;
  return s;
}

Regime BandwidthSchedule::implied_regime() const {
  if (kind == Kind::fixed || theta == 0.0) return Regime::fixed_h;
  return theta < 0.0 ? Regime::echcond : Regime::rchcond;
}

void BandwidthSchedule::validate(Regime regime) const {
  if (kind == Kind::fixed) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("fixed bandwidth must be > 0", 0, "schedule");
    if (regime == Regime::echcond || regime == Regime::rchcond)
      throw ConfigError("a fixed bandwidth cannot satisfy a vanishing or growing regime", 0,
                        "schedule");
    return;
  }
  if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(theta))
    throw ConfigError("power_law needs c > 0 and a finite exponent", 0, "schedule");
  switch (regime) {
  case Regime::echcond:
    if (!(theta > -0.25 && theta < 0.0))
      throw ConfigError("exponent must lie in (-1/4, 0) so that h -> 0 and h^2 sqrt(n) -> inf", 0,
                        "schedule");
    break;
  case Regime::rchcond:
    if (!(theta > 0.0 && theta < 0.25))
      throw ConfigError("exponent must lie in (0, 1/4) so that h -> inf and h^2 / sqrt(n) -> 0", 0,
                        "schedule");
    break;
  case Regime::fixed_h:
    if (theta != 0.0) throw ConfigError("fixed-h regime needs exponent 0", 0, "schedule");
    break;
  case Regime::any: break;
  }
}

std::string BandwidthSchedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::fixed) os << "fixed(" << h << ")";
  else os << "power_law(" << c << "," << theta << ")";
  return os.str();
}

double bandwidth(const BandwidthSchedule& s, std::size_t n) {
  if (n < 1) throw InvalidInput("bandwidth: n must be >= 1");
  if (s.kind == BandwidthSchedule::Kind::fixed) return s.h;
  return s.c * std::pow(static_cast<double>(n), s.theta);
}

double l2_centered_error(const RegressionModel& model, const Hypothesis& f) {
  const auto nodes = model.marginal.nodes(kMarginalNodes);
  double mean = 0.0;
  std::vector<double> d(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    d[k] = f(nodes[k].x) - model.f_star(nodes[k].x);
    mean += nodes[k].w * d[k];
  }
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) s += nodes[k].w * (d[k] - mean) * (d[k] - mean);
  return s;
}

double v_star(const RegressionModel& model) {
  if (model.exact_v_star) return *model.exact_v_star;
  if (model.homoskedastic()) return v_functional(model, model.f_star).V;
  throw InvalidModel("no optimal entropy value available for '" + model.id + "'");
}

ExperimentRecord run_trial(const RegressionModel& model, const std::string& space, std::size_t n,
                           const BandwidthSchedule& schedule, std::uint64_t seed,
                           const LabOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.model_id = model.id;
  rec.space = model.space(space).name();
  rec.n = n;
  rec.seed = seed;
  rec.h = bandwidth(schedule, n);

  Rng rng{opt.fit.seed, static_cast<std::uint64_t>(n), seed, kDataStream};
  const Dataset data = model.sample(n, rng);
  FitConfig cfg = opt.fit;
  cfg.M = model.M;
  cfg.seed = Rng{opt.fit.seed, static_cast<std::uint64_t>(n), seed, kFitStream}();
  const auto fitted = fit(data, model.space(space), rec.h, cfg);
  const Hypothesis& fz = fitted.hypothesis;
  rec.theta = fz.theta;

  const double Rstar = -std::log(-v_star(model));
  rec.entropy_gap = v_functional(model, fz).R - Rstar;
  rec.l2_centered = l2_centered_error(model, fz);
  rec.min_b_l2 = std::sqrt(rec.l2_centered);
  if (model.id == "counterexample") rec.dist_minset = cx_minimizer_distance(model, fz);
  else if (model.homoskedastic()) rec.dist_minset = rec.min_b_l2;

  if (opt.record_time) {
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

std::vector<ExperimentRecord> run_sweep(const RegressionModel& model, const std::string& space,
                                        const std::vector<std::size_t>& n_list,
                                        const BandwidthSchedule& schedule,
                                        const std::vector<std::uint64_t>& seeds,
                                        const LabOptions& opt) {
  std::vector<ExperimentRecord> out(n_list.size() * seeds.size());
  parallel_for(out.size(), [&](std::size_t i) {
    const std::size_t n = n_list[i / seeds.size()];
    const std::uint64_t seed = seeds[i % seeds.size()];
    try {
      out[i] = run_trial(model, space, n, schedule, seed, opt);
    } catch (const std::exception& e) {
      ExperimentRecord r;
      r.model_id = model.id;
      r.space = space.empty() ? model.default_space : space;
      r.n = n;
      r.seed = seed;
      r.h = kNaN;
      try {
        r.h = bandwidth(schedule, n);
      } catch (...) {
      }
      r.entropy_gap = r.l2_centered = r.min_b_l2 = kNaN;
      r.dist_minset = kNaN;
      r.error = e.what();
      out[i] = r;
    }
  });
  return out;
}

Metric parse_metric(const std::string& name) {
  if (name == "entropy_gap") return Metric::entropy_gap;
  if (name == "l2_centered") return Metric::l2_centered;
  if (name == "dist_minset") return Metric::dist_minset;
  if (name == "min_b_l2") return Metric::min_b_l2;
  throw InvalidInput("unknown metric '" + name + "'");
}

std::string metric_name(Metric m) {
  switch (m) {
  case Metric::entropy_gap: return "entropy_gap";
  case Metric::l2_centered: return "l2_centered";
  case Metric::dist_minset: return "dist_minset";
  case Metric::min_b_l2: return "min_b_l2";
  }
  return "?";
}

std::optional<double> metric_value(const ExperimentRecord& r, Metric m) {
  if (!r.ok()) return std::nullopt;
  switch (m) {
  case Metric::entropy_gap: return r.entropy_gap;
  case Metric::l2_centered: return r.l2_centered;
  case Metric::dist_minset: return r.dist_minset;
  case Metric::min_b_l2: return r.min_b_l2;
  }
  return std::nullopt;
}

double median_at(const std::vector<ExperimentRecord>& records, Metric metric, std::size_t n) {
  std::vector<double> v;
  for (const auto& r : records)
    if (r.n == n)
      if (auto x = metric_value(r, metric); x && std::isfinite(*x)) v.push_back(*x);
  if (v.empty()) return kNaN;
  return median(v);
}

RateFit fit_rate(const std::vector<ExperimentRecord>& records, Metric metric) {
  RateFit out;
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& r : records) {
    auto v = metric_value(r, metric);
    if (!v || !std::isfinite(*v) || *v <= 0.0) {
      ++out.excluded;
      continue;
    }
    by_n[r.n].push_back(*v);
  }
  if (by_n.size() < 3) throw InvalidInput("fit_rate needs at least 3 distinct n with positive values");
  std::vector<double> lx, ly;
  for (auto& [n, vals] : by_n) {
    out.n.push_back(n);
    out.median.push_back(median(vals));
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(out.median.back()));
  }
  const double k = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  return out;
}

double concentration_bound(std::size_t n, double h, double eps) {
  return std::exp(-2.0 * static_cast<double>(n) * h * h * eps * eps);
}

double SampleErrorEstimate::exceedance(double eps) const {
  if (S.empty()) return kNaN;
  std::size_t c = 0;
  for (double s : S)
    if (s - mean_S > eps) ++c;
  return static_cast<double>(c) / static_cast<double>(S.size());
}

SampleErrorEstimate sample_error_estimate(const RegressionModel& model,
                                          const std::vector<Hypothesis>& grid, std::size_t n,
                                          double h, std::size_t reps, std::uint64_t seed,
                                          const std::vector<double>& eps_list) {
  if (grid.empty()) throw InvalidInput("sample_error_estimate: empty parameter grid");
  if (!(h > 0.0)) throw InvalidBandwidth(h);
  if (n < 1) throw InvalidInput("sample_error_estimate: n must be >= 1");
  SampleErrorEstimate out;
  if (reps == 0) {
    out.mean_S = kNaN;
    return out;
  }
  std::vector<double> truth(grid.size());
  parallel_for(grid.size(), [&](std::size_t g) { truth[g] = info_error_true(model, grid[g], h); });

  out.S.assign(reps, 0.0);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng{seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r), kConcStream};
    const Dataset data = model.sample(n, rng);
    double s = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g)
      s = std::max(s, std::abs(empirical_info_error(grid[g], data, h) - truth[g]));
    out.S[r] = s;
  });
  double sum = 0.0;
  for (double s : out.S) sum += s;
  out.mean_S = sum / static_cast<double>(reps);
  for (double eps : eps_list) {
    TailRow row;
    row.eps = eps;
    row.frequency = out.exceedance(eps);
    row.bound = concentration_bound(n, h, eps);
    const double p = std::min(row.bound, 1.0);
    row.slack = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    out.table.push_back(row);
  }
  return out;
}

} // namespace mee
