#include "mee/errors.hpp"
#include "mee/mee_fit.hpp"
#include "mee/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>

using namespace mee;

namespace {

Dataset sample(const RegressionModel& m, std::size_t n, std::uint64_t seed) {
  Rng rng{seed};
  return m.sample(n, rng);
}

} // namespace

TEST(Fit, DeterministicGivenSeed) {
  const auto m = make_model("gaussian");
  const auto data = sample(m, 300, 1);
  FitConfig cfg;
  cfg.seed = 17;
  const auto a = fit(data, m.space("cosine:2"), 0.5, cfg);
  const auto b = fit(data, m.space("cosine:2"), 0.5, cfg);
  EXPECT_EQ(a.hypothesis.theta, b.hypothesis.theta);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.to_json(), b.to_json());
}

TEST(Fit, NeverWorseThanAnyStart) {
  for (const char* id : {"gaussian", "counterexample", "bimodal"}) {
    const auto m = make_model(id);
    const auto data = sample(m, 200, 2);
    for (auto rule : {StepRule::backtracking, StepRule::fixed}) {
      FitConfig cfg;
      cfg.step_rule = rule;
      cfg.restarts = 5;
      cfg.seed = 3;
      const auto r = fit(data, m.space(m.default_space), 0.7, cfg);
      for (double init : r.initial_objectives) EXPECT_LE(r.objective, init) << id;
      for (double fin : r.trace) EXPECT_LE(r.objective, fin) << id;
      for (std::size_t k = 1; k < r.path.size(); ++k) EXPECT_LE(r.path[k], r.path[k - 1]) << id;
      EXPECT_TRUE(r.hypothesis.space.feasible(r.hypothesis.theta, cfg.M));
      EXPECT_NEAR(r.objective, empirical_info_error(r.hypothesis, data, 0.7), 1e-15);
    }
  }
}

TEST(Fit, RecoversShapeOnGaussianData) {
  const auto m = make_model("gaussian", {{"sigma", 0.3}});
  const auto data = sample(m, 2000, 4);
  FitConfig cfg;
  cfg.seed = 1;
  const auto r = fit(data, m.space("cosine:2"), 0.4, cfg);
  EXPECT_NEAR(r.hypothesis.theta[0], 0.5, 0.05);
  EXPECT_NEAR(r.hypothesis.theta[1], -0.3, 0.05);
  // cosine:2 has no intercept; b_z recovers the mean offset (zero here).
  EXPECT_NEAR(r.b_z, 0.0, 0.05);
  EXPECT_NEAR(adjusted_predict(r, 0.3), r.hypothesis(0.3) + r.b_z, 1e-15);
}

TEST(Fit, GridPassNeverHurts) {
  const auto m = make_model("counterexample");
  const auto data = sample(m, 300, 5);
  FitConfig cfg;
  cfg.restarts = 1;
  cfg.seed = 9;
  const auto plain = fit(data, m.space("piecewise_constant"), 0.3, cfg);
  cfg.grid_points = 41;
  const auto grid = fit(data, m.space("piecewise_constant"), 0.3, cfg);
  EXPECT_LE(grid.objective, plain.objective);
}

TEST(Fit, Errors) {
  const auto m = make_model("gaussian");
  const auto data = sample(m, 10, 6);
  FitConfig cfg;
  EXPECT_THROW(fit(data, m.space("cosine:2"), 0.0, cfg), InvalidBandwidth);
  EXPECT_THROW(fit(data, m.space("cosine:2"), -1.0, cfg), InvalidBandwidth);
  EXPECT_THROW(fit(sample(m, 1, 7), m.space("cosine:2"), 1.0, cfg), DegenerateSample);
  cfg.restarts = 0;
  EXPECT_THROW(fit(data, m.space("cosine:2"), 1.0, cfg), InvalidInput);
  cfg.restarts = 1;
  cfg.tol_grad = 0.0;
  EXPECT_THROW(fit(data, m.space("cosine:2"), 1.0, cfg), InvalidInput);
}

TEST(Fit, JsonFields) {
  const auto m = make_model("gaussian");
  const auto data = sample(m, 50, 8);
  FitConfig cfg;
  cfg.restarts = 2;
  const auto j = nlohmann::json::parse(fit(data, m.space("cosine:2"), 1.0, cfg).to_json());
  for (const char* k : {"space_kind", "theta", "b_z", "objective", "h", "seed", "restart_objectives"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["restart_objectives"].size(), 2u);
}
