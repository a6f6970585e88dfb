#include "mee/errors.hpp"
#include "mee/kernel_objective.hpp"
#include "mee/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace mee;

namespace {

double naive_info_error(const std::vector<double>& e, double h) {
  const double n = static_cast<double>(e.size());
  double s = 0.0;
  for (double a : e)
    for (double b : e) s += std::exp(-(a - b) * (a - b) / (2 * h * h)) / (std::sqrt(2 * std::numbers::pi) * h);
  return -s / (n * n);
}

Dataset sample(const std::string& model, std::size_t n, std::uint64_t seed) {
  Rng rng{seed};
  return make_model(model).sample(n, rng);
}

} // namespace

TEST(KernelObjective, KernelValues) {
  EXPECT_NEAR(gaussian_kernel(0.0, 1.0), 1.0 / std::sqrt(2 * std::numbers::pi), 1e-16);
  EXPECT_NEAR(gaussian_kernel(0.5, 0.25), std::exp(-2.0) / (std::sqrt(2 * std::numbers::pi) * 0.25), 1e-15);
  EXPECT_THROW(gaussian_kernel(0.0, 0.0), InvalidBandwidth);
  EXPECT_THROW(gaussian_kernel(0.0, -1.0), InvalidBandwidth);
}

TEST(KernelObjective, MatchesDoubleLoop) {
  Rng rng{5};
  for (std::size_t n : {1u, 2u, 7u, 300u, 700u}) {
    std::vector<double> e(n);
    for (auto& v : e) v = rng.normal();
    for (double h : {0.05, 0.7, 9.0}) {
      const double ref = naive_info_error(e, h);
      EXPECT_NEAR(empirical_info_error(e, h), ref, 1e-13 * std::abs(ref)) << n << " " << h;
    }
  }
}

TEST(KernelObjective, SingleErrorIsDiagonalOnly) {
  const std::vector<double> e = {3.0};
  EXPECT_NEAR(empirical_info_error(e, 2.0), -gaussian_kernel(0.0, 2.0), 1e-16);
}

TEST(KernelObjective, KdeAveragesKernels) {
  const std::vector<double> e = {-1.0, 0.0, 2.0};
  const double want = (gaussian_kernel(1.5, 0.5) + gaussian_kernel(0.5, 0.5) + gaussian_kernel(-1.5, 0.5)) / 3.0;
  EXPECT_NEAR(kde_at(e, 0.5, 0.5), want, 1e-16);
}

TEST(KernelObjective, TranslationInvariance) {
  auto data = sample("gaussian", 400, 1);
  const auto model = make_model("gaussian");
  Hypothesis f{model.space("poly:2"), {0.1, -0.2, 0.05}, 1.0};
  const double a = empirical_info_error(f, data, 0.4);
  auto shifted = data;
  for (auto& y : shifted.y) y += 0.37;
  EXPECT_NEAR(empirical_info_error(f, shifted, 0.4), a, 1e-12 * std::abs(a));
  EXPECT_NEAR(empirical_info_error(f.shifted(0.37), shifted, 0.4), a, 1e-12 * std::abs(a));
}

TEST(KernelObjective, BoundsFromKernelMaximum) {
  auto data = sample("laplace", 300, 2);
  const auto model = make_model("laplace");
  Hypothesis f{model.space("cosine:2"), {0.2, 0.1}, 1.0};
  for (double h : {0.1, 1.0}) {
    const double E = empirical_info_error(f, data, h);
    EXPECT_LT(E, 0.0);
    EXPECT_GE(E, -gaussian_kernel(0.0, h) * (1 + 1e-15));
    EXPECT_NEAR(empirical_renyi(f, data, h), -std::log(-E), 1e-15);
  }
}

TEST(KernelObjective, GradientMatchesFiniteDifferences) {
  const char* spaces[] = {"cosine:2", "poly:3", "hat:4", "bins:3", "constant", "linear"};
  std::uint64_t seed = 10;
  for (const char* sp : spaces) {
    auto data = sample("gaussian", 150, seed++);
    const auto model = make_model("gaussian");
    const auto space = model.space(sp);
    Rng rng{seed};
    Hypothesis f{space, std::vector<double>(space.dim()), 1.0};
    for (auto& t : f.theta) t = rng.uniform(-0.3, 0.3);
    const double h = 0.5;
    const auto g = grad_info_error(f, data, h);
    const auto both = info_error_with_gradient(f, data, h);
    EXPECT_EQ(both.value, empirical_info_error(f, data, h));
    for (std::size_t j = 0; j < space.dim(); ++j) {
      const double step = 1e-5;
      auto p = f, m = f;
      p.theta[j] += step;
      m.theta[j] -= step;
      const double fd = (empirical_info_error(p, data, h) - empirical_info_error(m, data, h)) / (2 * step);
      EXPECT_NEAR(g[j], fd, 1e-6 * std::max(std::abs(fd), 1e-3)) << sp << " j=" << j;
      EXPECT_EQ(g[j], both.gradient[j]);
    }
  }
}

TEST(KernelObjective, ConstantAdjustmentIsResidualMean) {
  Dataset d{{0.0, 0.5, 1.0}, {1.0, 2.0, 4.0}};
  const auto model = make_model("gaussian");
  Hypothesis f{model.space("linear"), {1.0}, 2.0};
  EXPECT_NEAR(constant_adjustment(f, d), ((1.0 - 0.0) + (2.0 - 0.5) + (4.0 - 1.0)) / 3.0, 1e-15);
  const auto r = residuals(f, d);
  EXPECT_EQ(r[2], 3.0);
}

TEST(KernelObjective, CsvRoundTripIsExact) {
  auto data = sample("stable", 200, 3);
  const std::string path = ::testing::TempDir() + "mee_roundtrip.csv";
  write_dataset_csv(path, data);
  const auto back = read_dataset_csv(path);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back.x[i], data.x[i]);
    EXPECT_EQ(back.y[i], data.y[i]);
  }
}

TEST(KernelObjective, CsvParsing) {
  auto d = parse_dataset_csv("x,y\n0.5,1e-3\r\n-2,3\n");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.y[0], 1e-3);
  EXPECT_EQ(d.x[1], -2.0);
  EXPECT_THROW(parse_dataset_csv("a,b\n1,2\n"), InvalidInput);
  EXPECT_THROW(parse_dataset_csv("x,y\n1;2\n"), InvalidInput);
  EXPECT_THROW(read_dataset_csv("/nonexistent/dir/file.csv"), IoError);
}

TEST(KernelObjective, ResidualDump) {
  const std::string path = ::testing::TempDir() + "mee_res.csv";
  const std::vector<double> e = {0.25, -1.5};
  write_residuals_csv(path, e);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "i,e_i\n0,0.25\n1,-1.5\n");
}
