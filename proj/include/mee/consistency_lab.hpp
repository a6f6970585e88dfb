#pragma once

#include "mee/hypothesis.hpp"
#include "mee/mee_fit.hpp"
#include "mee/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mee {

enum class Regime {
  any,       // no rate condition
  echcond,   // h -> 0 with h^2 sqrt(n) -> inf: power laws with exponent in (-1/4, 0)
  rchcond,   // h -> inf with h^2 / sqrt(n) -> 0: exponent in (0, 1/4)
  fixed_h,   // constant bandwidth
};

struct BandwidthSchedule {
  enum class Kind { power_law, fixed };
  Kind kind = Kind::fixed;
  double c = 1.0;
  double theta = 0.0;
  double h = 1.0;

  static BandwidthSchedule power_law(double c, double theta);
  static BandwidthSchedule fixed(double h);

  /// Regime implied by the schedule: sign of the exponent, or fixed_h.
  Regime implied_regime() const;
  /// Throws ConfigError naming "schedule" when the schedule cannot satisfy
  /// the regime (any also checks h(n) > 0).
  void validate(Regime regime = Regime::any) const;
  std::string describe() const;
};

double bandwidth(const BandwidthSchedule& s, std::size_t n);

/// || f + E(f* - f) - f* ||^2 in L2(rho_X).
double l2_centered_error(const RegressionModel& model, const Hypothesis& f);

/// Exact V* where known, else V(f*) for homoskedastic models.
double v_star(const RegressionModel& model);

struct ExperimentRecord {
  std::string model_id;
  std::string space;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double h = 0.0;
  double entropy_gap = 0.0;
  double l2_centered = 0.0;
  std::optional<double> dist_minset;
  double min_b_l2 = 0.0;
  double wall_time_ms = 0.0;
  std::vector<double> theta;
  std::string error;  // empty on success
  bool ok() const { return error.empty(); }
};

struct LabOptions {
  FitConfig fit;               // fit.seed is the global seed
  bool record_time = false;    // wall_time_ms stays 0 unless set
};

/// Samples n points (stream keyed by global seed, n, seed), fits, and
/// scores f_z against the oracle. dist_minset is the distance to the
/// minimizer set: the constructed-minimizer distance for the two-interval
/// model and min_b ||f_z + b - f*|| for homoskedastic ones.
ExperimentRecord run_trial(const RegressionModel& model, const std::string& space, std::size_t n,
                           const BandwidthSchedule& schedule, std::uint64_t seed,
                           const LabOptions& opt);

/// All (n, seed) pairs, in n_list-major order. Failed trials keep their
/// slot with NaN metrics and the error message.
std::vector<ExperimentRecord> run_sweep(const RegressionModel& model, const std::string& space,
                                        const std::vector<std::size_t>& n_list,
                                        const BandwidthSchedule& schedule,
                                        const std::vector<std::uint64_t>& seeds,
                                        const LabOptions& opt);

enum class Metric { entropy_gap, l2_centered, dist_minset, min_b_l2 };
Metric parse_metric(const std::string& name);
std::string metric_name(Metric m);
std::optional<double> metric_value(const ExperimentRecord& r, Metric m);

struct RateFit {
  double slope = 0.0, intercept = 0.0;
  std::size_t excluded = 0;             // non-positive or missing values dropped
  std::vector<std::size_t> n;           // distinct n used
  std::vector<double> median;           // median metric per n
};

/// OLS of log(median over seeds) on log n. Needs >= 3 distinct n.
RateFit fit_rate(const std::vector<ExperimentRecord>& records, Metric metric);

/// Median of a metric at one n.
double median_at(const std::vector<ExperimentRecord>& records, Metric metric, std::size_t n);

struct TailRow {
  double eps = 0.0;
  double frequency = 0.0;  // empirical P(S - mean_S > eps)
  double bound = 0.0;      // exp(-2 n h^2 eps^2)
  double slack = 0.0;      // 3 binomial standard deviations at the bound
  bool holds() const { return frequency <= bound + slack; }
};

struct SampleErrorEstimate {
  std::vector<double> S;  // one value per replicate
  double mean_S = 0.0;
  std::vector<TailRow> table;
  double exceedance(double eps) const;
};

/// S_z = max over the grid of |E_{h,z}(f) - E_h(f)| for `reps` fresh samples.
SampleErrorEstimate sample_error_estimate(const RegressionModel& model,
                                          const std::vector<Hypothesis>& grid, std::size_t n,
                                          double h, std::size_t reps, std::uint64_t seed,
                                          const std::vector<double>& eps_list);

double concentration_bound(std::size_t n, double h, double eps);

} // namespace mee
