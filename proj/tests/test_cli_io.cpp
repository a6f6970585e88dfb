#include "mee/cli_io.hpp"
#include "mee/errors.hpp"
#include "mee/kernel_objective.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>

using namespace mee;

namespace {

std::string tmp(const std::string& name) { return ::testing::TempDir() + name; }

std::vector<ExperimentRecord> fake_records(std::size_t count) {
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    ExperimentRecord r;
    r.model_id = "gaussian";
    r.space = "cosine:2";
    r.n = 100 * (i / 10 + 1);
    r.seed = i % 10;
    r.h = 1.0 / 3.0;
    r.entropy_gap = 1e-3 / (i + 1);
    r.l2_centered = 0.1 + i;
    r.dist_minset = 0.2;
    r.min_b_l2 = std::sqrt(r.l2_centered);
    out.push_back(r);
  }
  return out;
}

} // namespace

TEST(Config, MinimalFitConfig) {
  const auto cfg = parse_config(
      "# minimal\nmodel = counterexample\nn = 1000\nschedule = power_law(1,-1/6)\nseed = 7\n",
      Command::fit);
  EXPECT_EQ(cfg.model_id, "counterexample");
  EXPECT_EQ(cfg.single_n(), 1000u);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.fit.seed, 7u);
  ASSERT_TRUE(cfg.schedule.has_value());
  EXPECT_NEAR(cfg.schedule->theta, -1.0 / 6.0, 1e-16);
}

TEST(Config, EchcondRejectsSteepSchedule) {
  try {
    parse_config("model_id = gaussian\nn = 100\nschedule = power_law(1, -0.3)\nregime = echcond\n",
                 Command::fit);
    FAIL() << "expected a config error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "schedule");
  }
}

TEST(Config, MissingModelNamesField) {
  try {
    parse_config("n = 100\nh = 1\n", Command::fit);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "model_id");
  }
}

TEST(Config, ParseErrorsCarryLine) {
  try {
    parse_config("model_id = gaussian\n\nbogus = 1\n", Command::oracle);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "bogus");
  }
  try {
    parse_config("model_id = gaussian\nno equals sign\n", Command::oracle);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_config("model_id = gaussian\nh = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("model_id = gaussian\nh = 1\nh = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("model_id = nosuch\ntheta = 0\n", Command::oracle), ConfigError);
  EXPECT_THROW(parse_config("model_id = gaussian\nmodel.nope = 1\ntheta = 0, 0\n", Command::oracle), ConfigError);
  // Sweeps need sample sizes.
  EXPECT_THROW(parse_config("model_id = gaussian\nh = 1\n", Command::sweep), ConfigError);
}

TEST(Config, ListsRangesAndParams) {
  const auto cfg = parse_config(
      "command = sweep\nmodel_id = gaussian\nmodel.sigma = 1/2\nn_list = 256, 1024,4096\n"
      "seeds = 0..9\nh = 1\nformat = json\ntiming = off\nstep_rule = fixed\n");
  EXPECT_EQ(cfg.command, Command::sweep);
  EXPECT_EQ(cfg.n_list, (std::vector<std::size_t>{256, 1024, 4096}));
  EXPECT_EQ(cfg.seeds.size(), 10u);
  EXPECT_EQ(cfg.params.at("sigma"), 0.5);
  EXPECT_EQ(cfg.format, OutputFormat::json);
  EXPECT_EQ(cfg.fit.step_rule, StepRule::fixed);
}

TEST(Emit, CsvLinesAndStability) {
  const auto recs = fake_records(30);
  const auto a = tmp("mee_a.csv"), b = tmp("mee_b.csv");
  emit_results(recs, OutputFormat::csv, a);
  emit_results(recs, OutputFormat::csv, b);
  const auto text = read_text_file(a);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 31);
  EXPECT_EQ(text, read_text_file(b));
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "model_id,space,n,h,seed,entropy_gap,l2_centered,dist_minset,min_b_l2,wall_time_ms");
  EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Emit, JsonShapes) {
  const auto p = tmp("mee_empty.json");
  emit_results({}, OutputFormat::json, p);
  EXPECT_EQ(read_text_file(p), "[]");
  auto recs = fake_records(2);
  recs[1].error = "boom";
  recs[1].entropy_gap = std::nan("");
  const auto j = nlohmann::json::parse(records_to_json(recs));
  EXPECT_EQ(j.size(), 2u);
  EXPECT_TRUE(j[1]["entropy_gap"].is_null());
  EXPECT_EQ(j[1]["error"], "boom");
  EXPECT_THROW(emit_results(recs, OutputFormat::csv, "/nonexistent/dir/x.csv"), IoError);
}

TEST(Emit, SummaryHasSlopes) {
  const auto s = nlohmann::json::parse(sweep_summary_json(fake_records(30)));
  EXPECT_TRUE(s["slopes"]["l2_centered"]["slope"].is_number());
  EXPECT_EQ(s["failed"], 0);
}

TEST(Generate, CounterexampleInputsStayOnDomain) {
  const auto d = generate_dataset("counterexample", {}, 10, 1);
  ASSERT_EQ(d.size(), 10u);
  for (double x : d.x) EXPECT_TRUE((x >= 0 && x <= 0.5) || (x >= 1 && x <= 1.5)) << x;
}

TEST(Generate, GaussianResidualVariance) {
  const auto d = generate_dataset("gaussian", {{"sigma", 0.8}}, 100000, 2);
  const auto m = make_model("gaussian", {{"sigma", 0.8}});
  const auto e = residuals(m.f_star, d);
  double mean = 0.0, var = 0.0;
  for (double v : e) mean += v;
  mean /= e.size();
  for (double v : e) var += (v - mean) * (v - mean);
  var /= e.size() - 1;
  EXPECT_NEAR(var, 0.64, 0.05 * 0.64);
}

TEST(Generate, EmptyAndRoundTrip) {
  const auto p0 = tmp("mee_empty.csv");
  generate_dataset("gaussian", {}, 0, 1, p0);
  EXPECT_EQ(read_text_file(p0), "x,y\n");
  const auto p = tmp("mee_gen.csv");
  generate_dataset("stable", {}, 500, 3, p);
  const auto back = read_dataset_csv(p);
  const auto orig = generate_dataset("stable", {}, 500, 3);
  EXPECT_EQ(back.x, orig.x);
  EXPECT_EQ(back.y, orig.y);
  EXPECT_THROW(generate_dataset("nosuch", {}, 5, 1), InvalidModel);
}

TEST(Commands, OracleAndCounterexampleOutputs) {
  auto cfg = parse_config("model_id = gaussian\ntheta = 0.5, -0.3\n", Command::oracle);
  const auto j = nlohmann::json::parse(run_command(cfg));
  EXPECT_NEAR(j["value"].get<double>(), -1.0 / (2 * std::sqrt(M_PI)), 1e-10);
  auto cx = parse_config("model_id = counterexample\nf1 = 0\nf2 = -1\n", Command::counterexample);
  const auto c = nlohmann::json::parse(run_command(cx));
  EXPECT_NEAR(c["V"].get<double>(), -0.625, 1e-15);
}

TEST(Commands, SweepOutputIsByteStable) {
  const std::string text =
      "model_id = gaussian\nn_list = 64, 128\nseeds = 0..1\nh = 1\nrestarts = 2\nseed = 4\n";
  auto cfg = parse_config(text, Command::sweep);
  cfg.output_path = tmp("mee_sweep.csv");
  const auto first = run_command(cfg);
  const auto again = run_command(parse_config(text, Command::sweep));
  EXPECT_EQ(first, again);
  EXPECT_EQ(read_text_file(cfg.output_path), first);
  const auto summary = nlohmann::json::parse(read_text_file(cfg.output_path + ".summary.json"));
  EXPECT_EQ(summary["records"], 4);
}
