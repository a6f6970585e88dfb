#include "mee/consistency_lab.hpp"
#include "mee/errors.hpp"
#include "mee/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mee;

TEST(Schedule, RegimeValidation) {
  EXPECT_NO_THROW(BandwidthSchedule::power_law(1, -1.0 / 6).validate(Regime::echcond));
  EXPECT_THROW(BandwidthSchedule::power_law(1, -0.3).validate(Regime::echcond), ConfigError);
  EXPECT_THROW(BandwidthSchedule::power_law(1, -0.25).validate(Regime::echcond), ConfigError);
  EXPECT_THROW(BandwidthSchedule::power_law(1, 0.1).validate(Regime::echcond), ConfigError);
  EXPECT_NO_THROW(BandwidthSchedule::power_law(1, 0.125).validate(Regime::rchcond));
  EXPECT_THROW(BandwidthSchedule::power_law(1, 0.25).validate(Regime::rchcond), ConfigError);
  EXPECT_THROW(BandwidthSchedule::fixed(1).validate(Regime::echcond), ConfigError);
  EXPECT_THROW(BandwidthSchedule::fixed(0).validate(), ConfigError);
  EXPECT_THROW(BandwidthSchedule::power_law(-1, 0.1).validate(), ConfigError);
  EXPECT_EQ(BandwidthSchedule::power_law(1, -0.1).implied_regime(), Regime::echcond);
  EXPECT_EQ(BandwidthSchedule::power_law(1, 0.1).implied_regime(), Regime::rchcond);
  EXPECT_EQ(BandwidthSchedule::fixed(2).implied_regime(), Regime::fixed_h);
  try {
    BandwidthSchedule::power_law(1, -0.3).validate(Regime::echcond);
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "schedule");
  }
}

TEST(Schedule, Bandwidth) {
  EXPECT_NEAR(bandwidth(BandwidthSchedule::power_law(1, -1.0 / 6), 4096), 0.25, 1e-15);
  EXPECT_NEAR(bandwidth(BandwidthSchedule::power_law(2, 0.125), 256), 4.0, 1e-15);
  EXPECT_EQ(bandwidth(BandwidthSchedule::fixed(8), 99), 8.0);
}

TEST(Lab, CenteredErrorIgnoresConstants) {
  const auto m = make_model("gaussian");
  EXPECT_NEAR(l2_centered_error(m, m.f_star), 0.0, 1e-30);
  Hypothesis g{m.space("cosine:2"), {0.5, -0.3}, 1.0};
  EXPECT_NEAR(l2_centered_error(m, g), 0.0, 1e-28);
  Hypothesis h{m.space("cosine:2"), {0.6, -0.3}, 1.0};
  // 0.1 cos(pi x) has mean 0 and second moment 0.01 / 2.
  EXPECT_NEAR(l2_centered_error(m, h), 0.005, 1e-15);
}

TEST(Lab, VStarSources) {
  EXPECT_EQ(v_star(make_model("counterexample")), -0.625);
  const auto g = make_model("gaussian");
  EXPECT_NEAR(v_star(g), v_functional(g, g.f_star).V, 1e-10);
}

TEST(Lab, TrialRecordsAndDeterminism) {
  const auto m = make_model("counterexample");
  LabOptions opt;
  opt.fit.restarts = 2;
  opt.fit.seed = 5;
  const auto s = BandwidthSchedule::power_law(1, -1.0 / 6);
  const auto a = run_trial(m, "", 200, s, 3, opt);
  const auto b = run_trial(m, "", 200, s, 3, opt);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.entropy_gap, b.entropy_gap);
  EXPECT_EQ(a.space, "piecewise_constant");
  EXPECT_GE(a.entropy_gap, -1e-9);
  ASSERT_TRUE(a.dist_minset.has_value());
  EXPECT_NEAR(a.min_b_l2 * a.min_b_l2, a.l2_centered, 1e-15);
  EXPECT_EQ(a.wall_time_ms, 0.0);
  const auto c = run_trial(m, "", 200, s, 4, opt);
  EXPECT_NE(a.theta, c.theta);
}

TEST(Lab, SweepKeepsFailedSlots) {
  const auto m = make_model("gaussian");
  LabOptions opt;
  opt.fit.restarts = 1;
  // n = 1 cannot be fit.
  const auto recs = run_sweep(m, "cosine:2", {1, 64}, BandwidthSchedule::fixed(1), {0, 1}, opt);
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_FALSE(recs[0].ok());
  EXPECT_TRUE(std::isnan(recs[0].entropy_gap));
  EXPECT_TRUE(recs[2].ok());
  EXPECT_EQ(recs[3].n, 64u);
  EXPECT_EQ(recs[3].seed, 1u);
}

TEST(Lab, RateFitOnSyntheticRecords) {
  std::vector<ExperimentRecord> recs;
  for (std::size_t n : {100u, 400u, 1600u}) {
    for (int s = 0; s < 3; ++s) {
      ExperimentRecord r;
      r.n = n;
      r.l2_centered = 3.0 * std::pow(static_cast<double>(n), -0.5) * (1.0 + 0.1 * (s - 1));
      r.entropy_gap = s == 0 ? -1.0 : 1.0;  // non-positive values are excluded
      recs.push_back(r);
    }
  }
  const auto fitr = fit_rate(recs, Metric::l2_centered);
  EXPECT_NEAR(fitr.slope, -0.5, 1e-12);
  EXPECT_NEAR(std::exp(fitr.intercept), 3.0, 1e-9);
  EXPECT_EQ(fitr.excluded, 0u);
  EXPECT_EQ(fit_rate(recs, Metric::entropy_gap).excluded, 3u);
  EXPECT_NEAR(median_at(recs, Metric::l2_centered, 400), 3.0 / 20.0, 1e-15);
  recs.resize(6);
  EXPECT_THROW(fit_rate(recs, Metric::l2_centered), InvalidInput);
  EXPECT_EQ(parse_metric("dist_minset"), Metric::dist_minset);
  EXPECT_THROW(parse_metric("nope"), InvalidInput);
}

TEST(Lab, ConcentrationEstimate) {
  const auto m = make_model("gaussian");
  std::vector<Hypothesis> grid;
  for (int i = 0; i < 5; ++i) grid.push_back(Hypothesis{m.space("cosine:2"), {-0.5 + 0.25 * i, -0.3}, 1.0});
  const auto est = sample_error_estimate(m, grid, 100, 1.0, 40, 3, {0.05, 0.1});
  ASSERT_EQ(est.S.size(), 40u);
  ASSERT_EQ(est.table.size(), 2u);
  EXPECT_GT(est.mean_S, 0.0);
  EXPECT_LE(est.table[1].frequency, est.table[0].frequency);
  EXPECT_NEAR(est.table[0].bound, std::exp(-2 * 100 * 0.0025), 1e-15);
  const auto none = sample_error_estimate(m, grid, 100, 1.0, 0, 3, {0.1});
  EXPECT_TRUE(std::isnan(none.mean_S));
  EXPECT_TRUE(none.table.empty());
  EXPECT_THROW(sample_error_estimate(m, {}, 100, 1.0, 10, 3, {}), InvalidInput);
}
