#pragma once

#include "mee/hypothesis.hpp"
#include "mee/kernel_objective.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mee {

enum class StepRule { fixed, backtracking };

struct FitConfig {
  int restarts = 8;
  int max_iters = 300;
  StepRule step_rule = StepRule::backtracking;
  double step = 0.1;      // fixed step size, also the first trial step scale
  double shrink = 0.5;    // backtracking factor
  double tol_grad = 1e-10;  // sup norm of the projected unit-step gradient
  double M = 1.0;
  std::uint64_t seed = 0;
  /// Per-axis grid size for the brute-force pass on spaces with <= 2
  /// parameters; 0 disables it.
  int grid_points = 0;

  void validate() const;
};

struct FittedModel {
  Hypothesis hypothesis;
  double b_z = 0.0;
  double objective = 0.0;
  double h = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> trace;               // final objective of each restart
  std::vector<double> initial_objectives;  // objective at each starting point
  /// Objective after every accepted step of the winning restart.
  std::vector<double> path;
  bool from_grid = false;

  std::string to_json() const;
};

/// Multi-start projected gradient minimization of the empirical information
/// error. Deterministic given cfg.seed.
FittedModel fit(const Dataset& data, const HypothesisSpace& space, double h, const FitConfig& cfg);

double adjusted_predict(const FittedModel& m, double x);

} // namespace mee
