#include "mee/mee_fit.hpp"

#include "mee/errors.hpp"
#include "mee/parallel.hpp"
#include "mee/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace mee {
namespace {

struct Run {
  std::vector<double> theta;
  double objective = 0.0;
  double initial = 0.0;
  std::vector<double> path;
};

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Run descend(const Dataset& data, Hypothesis f, double h, const FitConfig& cfg) {
  Run run;
  auto cur = info_error_with_gradient(f, data, h);
  run.initial = cur.value;
  run.path.push_back(cur.value);
  const std::size_t d = f.theta.size();
  std::vector<double> trial(d), prev_theta, prev_grad;
  double alpha = cfg.step / std::max(sup_norm(cur.gradient), 1e-300);

  for (int it = 0; it < cfg.max_iters; ++it) {
    // Stationarity of the projected unit step.
    for (std::size_t j = 0; j < d; ++j) trial[j] = f.theta[j] - cur.gradient[j];
    f.space.project(trial, cfg.M);
    double pg = 0.0;
    for (std::size_t j = 0; j < d; ++j) pg = std::max(pg, std::abs(trial[j] - f.theta[j]));
    if (pg <= cfg.tol_grad) break;

    if (!prev_theta.empty() && cfg.step_rule == StepRule::backtracking) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double s = f.theta[j] - prev_theta[j], y = cur.gradient[j] - prev_grad[j];
        ss += s * s;
        sy += s * y;
      }
      if (sy > 0.0 && ss > 0.0) alpha = ss / sy;
      else alpha *= 2.0;
    }
    if (cfg.step_rule == StepRule::fixed) alpha = cfg.step;

    bool accepted = false;
    Hypothesis cand = f;
    ObjectiveValue next;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t j = 0; j < d; ++j) cand.theta[j] = f.theta[j] - alpha * cur.gradient[j];
      f.space.project(cand.theta, cfg.M);
      double decrease = 0.0;
      for (std::size_t j = 0; j < d; ++j) decrease += cur.gradient[j] * (cand.theta[j] - f.theta[j]);
      if (cand.theta == f.theta) break;
      next = info_error_with_gradient(cand, data, h);
      if (cfg.step_rule == StepRule::fixed) {
        accepted = next.value <= cur.value;
        break;
      }
      if (next.value <= cur.value + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      alpha *= cfg.shrink;
    }
    if (!accepted) break;
    prev_theta = f.theta;
    prev_grad = cur.gradient;
    f.theta = cand.theta;
    cur = std::move(next);
    run.path.push_back(cur.value);
  }
  run.theta = f.theta;
  run.objective = cur.value;
  return run;
}

bool better(double obj, const std::vector<double>& theta, double best_obj,
            const std::vector<double>& best_theta) {
  if (obj != best_obj) return obj < best_obj;
  return std::lexicographical_compare(theta.begin(), theta.end(), best_theta.begin(),
                                      best_theta.end());
}

} // namespace

void FitConfig::validate() const {
  if (restarts < 1) throw InvalidInput("fit: restarts must be >= 1");
  if (max_iters < 0) throw InvalidInput("fit: max_iters must be >= 0");
  if (!(tol_grad > 0.0)) throw InvalidInput("fit: tol_grad must be > 0");
  if (!(M > 0.0)) throw InvalidInput("fit: projection bound M must be > 0");
  if (!(step > 0.0)) throw InvalidInput("fit: step must be > 0");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidInput("fit: shrink must be in (0, 1)");
  if (grid_points < 0 || grid_points == 1) throw InvalidInput("fit: grid_points must be 0 or >= 2");
}

FittedModel fit(const Dataset& data, const HypothesisSpace& space, double h, const FitConfig& cfg) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidBandwidth(h);
  if (data.size() < 2) throw DegenerateSample("fit needs at least 2 observations");
  cfg.validate();
  const std::size_t d = space.dim();

  std::vector<Run> runs(static_cast<std::size_t>(cfg.restarts));
  parallel_for(runs.size(), [&](std::size_t r) {
    Rng rng{cfg.seed, 0x6669740000000000ULL, static_cast<std::uint64_t>(r)};
    Hypothesis f{space, std::vector<double>(d), cfg.M};
    for (auto& t : f.theta) t = rng.uniform(-cfg.M, cfg.M);
    space.project(f.theta, cfg.M);
    runs[r] = descend(data, std::move(f), h, cfg);
  });

  FittedModel out;
  out.h = h;
  out.seed = cfg.seed;
  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    out.trace.push_back(runs[r].objective);
    out.initial_objectives.push_back(runs[r].initial);
    if (r > 0 && better(runs[r].objective, runs[r].theta, runs[best].objective, runs[best].theta))
      best = r;
  }
  Run winner = runs[best];

  if (cfg.grid_points >= 2 && d <= 2) {
    // Brute-force pass over the parameter box, then polish the grid winner.
    const int g = cfg.grid_points;
    const std::size_t total = d == 1 ? g : static_cast<std::size_t>(g) * g;
    std::vector<double> values(total, HUGE_VAL);
    auto point = [&](std::size_t idx) {
      std::vector<double> th(d);
      th[0] = -cfg.M + 2.0 * cfg.M * static_cast<double>(idx % g) / (g - 1);
      if (d == 2) th[1] = -cfg.M + 2.0 * cfg.M * static_cast<double>(idx / g) / (g - 1);
      return th;
    };
    parallel_for(total, [&](std::size_t idx) {
      auto th = point(idx);
      if (!space.feasible(th, cfg.M)) return;
      values[idx] = empirical_info_error(Hypothesis{space, th, cfg.M}, data, h);
    });
    const std::size_t gi =
        static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    if (values[gi] < winner.objective) {
      Run polished = descend(data, Hypothesis{space, point(gi), cfg.M}, h, cfg);
      winner = polished;
      out.from_grid = true;
    }
  }

  out.hypothesis = Hypothesis{space, winner.theta, cfg.M};
  out.objective = winner.objective;
  out.path = std::move(winner.path);
  out.b_z = constant_adjustment(out.hypothesis, data);
  return out;
}

double adjusted_predict(const FittedModel& m, double x) { return m.hypothesis(x) + m.b_z; }

std::string FittedModel::to_json() const {
  nlohmann::ordered_json j;
  j["space_kind"] = hypothesis.space.name();
  j["theta"] = hypothesis.theta;
  j["b_z"] = b_z;
  j["objective"] = objective;
  j["h"] = h;
  j["seed"] = seed;
  j["restart_objectives"] = trace;
  return j.dump();
}

} // namespace mee
