#include "mee/cli_io.hpp"

#include "mee/counterexample.hpp"
#include "mee/errors.hpp"
#include "mee/kernel_objective.hpp"
#include "mee/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace mee {
namespace {

constexpr std::uint64_t kGenerateStream = 0x67656e;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& raw, int line, const std::string& key) {
  const std::string s = trim(raw);
  auto plain = [&](std::string_view t) {
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto* p = t.data();
    if (p != end && *p == '+') ++p;
    auto [q, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || q != end || t.empty())
      throw ConfigError("not a number: '" + std::string(t) + "'", line, key);
    return v;
  };
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const double num = plain(trim(s.substr(0, slash)));
    const double den = plain(trim(s.substr(slash + 1)));
    if (den == 0.0) throw ConfigError("zero denominator", line, key);
    return num / den;
  }
  return plain(s);
}

std::uint64_t parse_uint(const std::string& raw, int line, const std::string& key) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  auto [q, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || q != s.data() + s.size() || s.empty())
    throw ConfigError("not a non-negative integer: '" + s + "'", line, key);
  return v;
}

std::vector<std::uint64_t> parse_uint_list(const std::string& raw, int line, const std::string& key) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(raw, ',')) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const auto a = parse_uint(item.substr(0, dots), line, key);
      const auto b = parse_uint(item.substr(dots + 2), line, key);
      if (b < a) throw ConfigError("empty range '" + item + "'", line, key);
      for (auto v = a; v <= b; ++v) out.push_back(v);
    } else {
      out.push_back(parse_uint(item, line, key));
    }
  }
  return out;
}

std::vector<double> parse_list(const std::string& raw, int line, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(raw, ',')) out.push_back(parse_number(item, line, key));
  return out;
}

BandwidthSchedule parse_schedule(const std::string& raw, int line) {
  const std::string s = trim(raw);
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    throw ConfigError("expected power_law(c, theta) or fixed(h)", line, "schedule");
  const std::string name = trim(s.substr(0, open));
  const auto args = parse_list(s.substr(open + 1, s.size() - open - 2), line, "schedule");
  if (name == "power_law") {
    if (args.size() != 2) throw ConfigError("power_law takes 2 arguments", line, "schedule");
    return BandwidthSchedule::power_law(args[0], args[1]);
  }
  if (name == "fixed") {
    if (args.size() != 1) throw ConfigError("fixed takes 1 argument", line, "schedule");
    return BandwidthSchedule::fixed(args[0]);
  }
  throw ConfigError("unknown schedule '" + name + "'", line, "schedule");
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("expected on/off", line, key);
}

nlohmann::ordered_json number(double v) {
  // JSON has no NaN; failed metrics become null.
  if (!std::isfinite(v)) return nullptr;
  return v;
}

HypothesisSpace space_of(const RegressionModel& model, const RunConfig& cfg) {
  return model.space(cfg.space);
}

Hypothesis hypothesis_of(const RegressionModel& model, const RunConfig& cfg) {
  const auto space = space_of(model, cfg);
  if (cfg.theta.size() != space.dim())
    throw ConfigError("theta needs " + std::to_string(space.dim()) + " values for " + space.name(),
                      0, "theta");
  return Hypothesis{space, cfg.theta, model.M};
}

Dataset dataset_for(const RegressionModel& model, const RunConfig& cfg) {
  if (!cfg.data_path.empty()) return read_dataset_csv(cfg.data_path);
  const std::size_t n = cfg.single_n();
  Rng rng{cfg.seed, static_cast<std::uint64_t>(n), kGenerateStream};
  return model.sample(n, rng);
}

std::string run_concentration(const RegressionModel& model, const RunConfig& cfg) {
  const auto space = space_of(model, cfg);
  std::vector<double> base = cfg.theta.empty() ? model.f_star.theta : cfg.theta;
  if (base.size() != space.dim()) throw ConfigError("theta does not match the space", 0, "theta");
  if (cfg.grid_axis >= space.dim()) throw ConfigError("axis out of range", 0, "grid_axis");
  if (cfg.grid_count < 1) throw ConfigError("grid needs at least one point", 0, "grid_count");
  std::vector<Hypothesis> grid;
  for (std::size_t g = 0; g < cfg.grid_count; ++g) {
    auto th = base;
    th[cfg.grid_axis] = cfg.grid_count == 1
                            ? cfg.grid_lo
                            : cfg.grid_lo + (cfg.grid_hi - cfg.grid_lo) * static_cast<double>(g) /
                                                static_cast<double>(cfg.grid_count - 1);
    grid.push_back(Hypothesis{space, th, model.M});
  }
  std::ostringstream os;
  os << "n,h,reps,mean_S,eps,frequency,bound,slack,holds\n";
  for (std::size_t n : cfg.n_list) {
    const double h = cfg.bandwidth_for(n);
    const auto est = sample_error_estimate(model, grid, n, h, cfg.reps, cfg.seed, cfg.eps);
    for (const auto& row : est.table) {
      os << n << ',' << format_double(h) << ',' << cfg.reps << ',' << format_double(est.mean_S)
         << ',' << format_double(row.eps) << ',' << format_double(row.frequency) << ','
         << format_double(row.bound) << ',' << format_double(row.slack) << ','
         << (row.holds() ? 1 : 0) << '\n';
    }
    if (est.table.empty())
      os << n << ',' << format_double(h) << ',' << cfg.reps << ',' << format_double(est.mean_S)
         << ",,,,,\n";
  }
  return os.str();
}

} // namespace

Command parse_command(const std::string& name) {
  static const std::pair<const char*, Command> table[] = {
      {"fit", Command::fit},
      {"entropy", Command::entropy},
      {"oracle", Command::oracle},
      {"counterexample", Command::counterexample},
      {"sweep", Command::sweep},
      {"concentration", Command::concentration},
      {"generate", Command::generate},
  };
  for (const auto& [n, c] : table)
    if (name == n) return c;
  throw ConfigError("unknown command '" + name + "'", 0, "command");
}

std::string command_name(Command c) {
  switch (c) {
  case Command::fit: return "fit";
  case Command::entropy: return "entropy";
  case Command::oracle: return "oracle";
  case Command::counterexample: return "counterexample";
  case Command::sweep: return "sweep";
  case Command::concentration: return "concentration";
  case Command::generate: return "generate";
  }
  return "?";
}

RunConfig parse_config(const std::string& text, std::optional<Command> command_override) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string body = trim(raw);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(body.substr(0, eq));
    const std::string val = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line);
    if (!seen.insert(key).second) throw ConfigError("duplicate key", line, key);
    if (val.empty()) throw ConfigError("missing value", line, key);

    if (key == "command") cfg.command = parse_command(val);
    else if (key == "model_id" || key == "model") cfg.model_id = val;
    else if (key.rfind("model.", 0) == 0) cfg.params[key.substr(6)] = parse_number(val, line, key);
    else if (key == "space") cfg.space = val;
    else if (key == "schedule") cfg.schedule = parse_schedule(val, line);
    else if (key == "h") cfg.schedule = BandwidthSchedule::fixed(parse_number(val, line, key));
    else if (key == "regime") {
      if (val == "any") cfg.regime = Regime::any;
      else if (val == "echcond") cfg.regime = Regime::echcond;
      else if (val == "rchcond") cfg.regime = Regime::rchcond;
      else if (val == "fixed") cfg.regime = Regime::fixed_h;
      else throw ConfigError("unknown regime '" + val + "'", line, key);
    } else if (key == "n" || key == "n_list") {
      for (auto v : parse_uint_list(val, line, key)) cfg.n_list.push_back(static_cast<std::size_t>(v));
    } else if (key == "seed") cfg.seed = parse_uint(val, line, key);
    else if (key == "seeds") cfg.seeds = parse_uint_list(val, line, key);
    else if (key == "theta") cfg.theta = parse_list(val, line, key);
    else if (key == "f1") cfg.f1 = parse_number(val, line, key);
    else if (key == "f2") cfg.f2 = parse_number(val, line, key);
    else if (key == "data") cfg.data_path = val;
    else if (key == "output") cfg.output_path = val;
    else if (key == "format") {
      if (val == "csv") cfg.format = OutputFormat::csv;
      else if (val == "json") cfg.format = OutputFormat::json;
      else throw ConfigError("expected csv or json", line, key);
    } else if (key == "restarts") cfg.fit.restarts = static_cast<int>(parse_uint(val, line, key));
    else if (key == "max_iters") cfg.fit.max_iters = static_cast<int>(parse_uint(val, line, key));
    else if (key == "step_rule") {
      if (val == "fixed") cfg.fit.step_rule = StepRule::fixed;
      else if (val == "backtracking") cfg.fit.step_rule = StepRule::backtracking;
      else throw ConfigError("expected fixed or backtracking", line, key);
    } else if (key == "step") cfg.fit.step = parse_number(val, line, key);
    else if (key == "shrink") cfg.fit.shrink = parse_number(val, line, key);
    else if (key == "tol_grad") cfg.fit.tol_grad = parse_number(val, line, key);
    else if (key == "grid_points") cfg.fit.grid_points = static_cast<int>(parse_uint(val, line, key));
    else if (key == "timing") cfg.timing = parse_bool(val, line, key);
    else if (key == "reps") cfg.reps = parse_uint(val, line, key);
    else if (key == "eps") cfg.eps = parse_list(val, line, key);
    else if (key == "grid_axis") cfg.grid_axis = parse_uint(val, line, key);
    else if (key == "grid_lo") cfg.grid_lo = parse_number(val, line, key);
    else if (key == "grid_hi") cfg.grid_hi = parse_number(val, line, key);
    else if (key == "grid_count") cfg.grid_count = parse_uint(val, line, key);
    else throw ConfigError("unknown key", line, key);
  }
  if (command_override) cfg.command = *command_override;
  cfg.fit.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig read_config(const std::string& path, std::optional<Command> command_override) {
  return parse_config(read_text_file(path), command_override);
}

void RunConfig::validate() const {
  if (model_id.empty()) throw ConfigError("required", 0, "model_id");
  const auto ids = registered_models();
  if (std::find(ids.begin(), ids.end(), model_id) == ids.end())
    throw ConfigError("unknown model '" + model_id + "'", 0, "model_id");
  RegressionModel model;
  try {
    model = make_model(model_id, params);
  } catch (const Error& e) {
    throw ConfigError(e.what(), 0, "model_id");
  }
  if (!space.empty()) {
    try {
      model.space(space);
    } catch (const Error& e) {
      throw ConfigError(e.what(), 0, "space");
    }
  }
  if (schedule) schedule->validate(regime);
  else if (regime != Regime::any) throw ConfigError("regime given without a schedule", 0, "schedule");
  try {
    fit.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what(), 0, "fit");
  }
  const bool needs_h = command == Command::fit || command == Command::entropy ||
                       command == Command::sweep || command == Command::concentration;
  if (needs_h && !schedule) throw ConfigError("required for " + command_name(command), 0, "schedule");
  const bool needs_n = command == Command::sweep || command == Command::concentration ||
                       command == Command::generate ||
                       ((command == Command::fit || command == Command::entropy) && data_path.empty());
  if (needs_n && n_list.empty()) throw ConfigError("required for " + command_name(command), 0, "n_list");
  for (auto n : n_list)
    if (n == 0 && command != Command::generate) throw ConfigError("sample sizes must be >= 1", 0, "n_list");
  if ((command == Command::entropy || command == Command::oracle) && theta.empty())
    throw ConfigError("required for " + command_name(command), 0, "theta");
  if (command == Command::concentration) {
    if (eps.empty()) throw ConfigError("required for concentration", 0, "eps");
    if (grid_count < 1) throw ConfigError("must be >= 1", 0, "grid_count");
  }
}

std::size_t RunConfig::single_n() const {
  if (n_list.size() != 1) throw ConfigError("exactly one sample size expected", 0, "n_list");
  return n_list.front();
}

double RunConfig::bandwidth_for(std::size_t n) const {
  if (!schedule) throw ConfigError("required", 0, "schedule");
  return bandwidth(*schedule, n);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, p);
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = "model_id,space,n,h,seed,entropy_gap,l2_centered,dist_minset,min_b_l2,wall_time_ms\n";
  for (const auto& r : records) {
    out += r.model_id + ',' + r.space + ',' + std::to_string(r.n) + ',' + format_double(r.h) + ',' +
           std::to_string(r.seed) + ',' + format_double(r.entropy_gap) + ',' +
           format_double(r.l2_centered) + ',' +
           (r.dist_minset ? format_double(*r.dist_minset) : std::string("nan")) + ',' +
           format_double(r.min_b_l2) + ',' + format_double(r.wall_time_ms) + '\n';
  }
  return out;
}

std::string records_to_json(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) return "[]";
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["model_id"] = r.model_id;
    j["space"] = r.space;
    j["n"] = r.n;
    j["h"] = number(r.h);
    j["seed"] = r.seed;
    j["entropy_gap"] = number(r.entropy_gap);
    j["l2_centered"] = number(r.l2_centered);
    j["dist_minset"] = r.dist_minset ? number(*r.dist_minset) : nullptr;
    j["min_b_l2"] = number(r.min_b_l2);
    j["wall_time_ms"] = number(r.wall_time_ms);
    j["theta"] = r.theta;
    if (!r.ok()) j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::string sweep_summary_json(const std::vector<ExperimentRecord>& records) {
  nlohmann::ordered_json j;
  j["records"] = records.size();
  std::size_t failed = 0;
  nlohmann::ordered_json errors = nlohmann::ordered_json::array();
  for (const auto& r : records)
    if (!r.ok()) {
      ++failed;
      errors.push_back({{"n", r.n}, {"seed", r.seed}, {"error", r.error}});
    }
  j["failed"] = failed;
  nlohmann::ordered_json slopes;
  for (Metric m : {Metric::entropy_gap, Metric::l2_centered, Metric::dist_minset, Metric::min_b_l2}) {
    nlohmann::ordered_json s;
    try {
      const auto fit = fit_rate(records, m);
      s["slope"] = fit.slope;
      s["intercept"] = fit.intercept;
      s["excluded"] = fit.excluded;
      s["n"] = fit.n;
      s["median"] = fit.median;
    } catch (const Error& e) {
      s["slope"] = nullptr;
      s["reason"] = e.what();
    }
    slopes[metric_name(m)] = std::move(s);
  }
  j["slopes"] = std::move(slopes);
  j["errors"] = std::move(errors);
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("write failed", path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed", path);
  return ss.str();
}

void emit_results(const std::vector<ExperimentRecord>& records, OutputFormat format,
                  const std::string& path) {
  write_text_file(path, format == OutputFormat::csv ? records_to_csv(records) : records_to_json(records));
}

Dataset generate_dataset(const std::string& model_id, const ParamMap& params, std::size_t n,
                         std::uint64_t seed) {
  const auto model = make_model(model_id, params);
  Rng rng{seed, static_cast<std::uint64_t>(n), kGenerateStream};
  return model.sample(n, rng);
}

void generate_dataset(const std::string& model_id, const ParamMap& params, std::size_t n,
                      std::uint64_t seed, const std::string& path) {
  write_dataset_csv(path, generate_dataset(model_id, params, n, seed));
}

std::string run_command(const RunConfig& cfg) {
  const auto model = make_model(cfg.model_id, cfg.params);
  std::string out;
  switch (cfg.command) {
  case Command::fit: {
    const Dataset data = dataset_for(model, cfg);
    FitConfig fc = cfg.fit;
    fc.M = model.M;
    const auto fitted = fit(data, space_of(model, cfg), cfg.bandwidth_for(data.size()), fc);
    out = fitted.to_json() + "\n";
    break;
  }
  case Command::entropy: {
    const Dataset data = dataset_for(model, cfg);
    const auto f = hypothesis_of(model, cfg);
    const double h = cfg.bandwidth_for(data.size());
    const double E = empirical_info_error(f, data, h);
    nlohmann::ordered_json j;
    j["model_id"] = model.id;
    j["space"] = f.space.name();
    j["theta"] = f.theta;
    j["n"] = data.size();
    j["h"] = h;
    j["info_error"] = E;
    j["renyi"] = -std::log(-E);
    j["b_z"] = constant_adjustment(f, data);
    out = j.dump(2) + "\n";
    break;
  }
  case Command::oracle: {
    const auto f = hypothesis_of(model, cfg);
    auto rep = v_functional(model, f);
    rep.model_id = model.id;
    rep.space = f.space.name();
    rep.hypothesis_params = f.theta;
    out = rep.to_json() + "\n";
    break;
  }
  case Command::counterexample: {
    if (model.id != "counterexample")
      throw ConfigError("counterexample command needs model_id = counterexample", 0, "model_id");
    const auto d = cx_decompose(cfg.f1, cfg.f2);
    HypothesisSpace pc = model.space("piecewise_constant");
    const double M = std::max({model.M, std::abs(cfg.f1), std::abs(cfg.f2)});
    const Hypothesis f{pc, {cfg.f1, cfg.f2}, M};
    const auto terms = cx_bound_terms(model, f);
    nlohmann::ordered_json j;
    j["f1"] = cfg.f1;
    j["f2"] = cfg.f2;
    j["V11"] = d.V11;
    j["V22"] = d.V22;
    j["V12"] = d.V12;
    j["V"] = d.V_total;
    j["R"] = d.R();
    j["k"] = d.k;
    j["b"] = d.b_frac;
    j["V_quadrature"] = v_functional(model, f).V;
    j["distance_to_minimizer"] = cx_minimizer_distance(model, f);
    j["bound_terms"] = {{"gap_sq", terms.gap_sq}, {"spread1", terms.spread1}, {"spread2", terms.spread2}};
    out = j.dump(2) + "\n";
    break;
  }
  case Command::sweep: {
    LabOptions opt;
    opt.fit = cfg.fit;
    opt.record_time = cfg.timing;
    std::vector<std::uint64_t> seeds = cfg.seeds;
    if (seeds.empty()) seeds = {0};
    const auto records = run_sweep(model, cfg.space, cfg.n_list, *cfg.schedule, seeds, opt);
    out = cfg.format == OutputFormat::csv ? records_to_csv(records) : records_to_json(records);
    if (!cfg.output_path.empty()) {
      write_text_file(cfg.output_path, out);
      write_text_file(cfg.output_path + ".summary.json", sweep_summary_json(records));
      return out;
    }
    break;
  }
  case Command::concentration: out = run_concentration(model, cfg); break;
  case Command::generate: {
    Rng rng{cfg.seed, static_cast<std::uint64_t>(cfg.single_n()), kGenerateStream};
    const Dataset data = model.sample(cfg.single_n(), rng);
    std::string text = "x,y\n";
    for (std::size_t i = 0; i < data.size(); ++i)
      text += format_double(data.x[i]) + ',' + format_double(data.y[i]) + '\n';
    out = text;
    break;
  }
  }
  if (!cfg.output_path.empty()) write_text_file(cfg.output_path, out);
  return out;
}

} // namespace mee
