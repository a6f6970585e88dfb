#pragma once

#include "mee/consistency_lab.hpp"
#include "mee/mee_fit.hpp"
#include "mee/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mee {

enum class Command { fit, entropy, oracle, counterexample, sweep, concentration, generate };
enum class OutputFormat { csv, json };

Command parse_command(const std::string& name);
std::string command_name(Command c);

/// Config grammar, one entry per line:
///
///   # comment
///   key = value
///
/// Numbers accept decimal, exponent and fraction forms (-1/6). Lists are
/// comma separated; integer lists also accept ranges (0..9). Keys:
///
///   command        fit | entropy | oracle | counterexample | sweep |
///                  concentration | generate
///   model_id       registered model id (required)
///   model.<name>   model parameter, e.g. model.sigma = 0.5
///   space          hypothesis space (defaults to the model's own)
///   schedule       power_law(c, theta) | fixed(h)
///   regime         any | echcond | rchcond | fixed (validates the schedule)
///   h              fixed bandwidth shorthand
///   n, n_list      sample sizes
///   seed           global seed
///   seeds          trial indices for sweeps
///   theta          hypothesis parameters (entropy, oracle)
///   f1, f2         piece values (counterexample)
///   data           dataset CSV to read instead of sampling (fit, entropy)
///   output         output path
///   format         csv | json
///   restarts, max_iters, step_rule (fixed | backtracking), step, shrink,
///   tol_grad, grid_points
///   timing         on | off (wall_time_ms column)
///   reps, eps, grid_axis, grid_lo, grid_hi, grid_count   (concentration)
struct RunConfig {
  Command command = Command::fit;
  std::string model_id;
  ParamMap params;
  std::string space;
  std::optional<BandwidthSchedule> schedule;
  Regime regime = Regime::any;
  std::vector<std::size_t> n_list;
  std::vector<std::uint64_t> seeds;
  std::uint64_t seed = 0;
  std::vector<double> theta;
  double f1 = 0.0, f2 = 0.0;
  std::string data_path;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  FitConfig fit;
  bool timing = false;
  std::size_t reps = 100;
  std::vector<double> eps;
  std::size_t grid_axis = 0;
  double grid_lo = -0.7, grid_hi = 0.7;
  std::size_t grid_count = 41;

  /// Cross-field checks: registered model, schedule against regime,
  /// command-specific requirements.
  void validate() const;
  /// The n to use for single-sample commands.
  std::size_t single_n() const;
  double bandwidth_for(std::size_t n) const;
};

/// Throws ConfigError carrying the line (parse errors) or field name.
/// `command_override` replaces any command given in the text.
RunConfig parse_config(const std::string& text, std::optional<Command> command_override = {});
RunConfig read_config(const std::string& path, std::optional<Command> command_override = {});

/// %.17g, '.' decimal regardless of locale.
std::string format_double(double v);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::string records_to_json(const std::vector<ExperimentRecord>& records);
/// Fitted slopes of each metric against n.
std::string sweep_summary_json(const std::vector<ExperimentRecord>& records);
void emit_results(const std::vector<ExperimentRecord>& records, OutputFormat format,
                  const std::string& path);

/// Writes text exactly; throws IoError with the path.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Samples n points from the model into CSV x,y; reproducible by seed.
Dataset generate_dataset(const std::string& model_id, const ParamMap& params, std::size_t n,
                         std::uint64_t seed);
void generate_dataset(const std::string& model_id, const ParamMap& params, std::size_t n,
                      std::uint64_t seed, const std::string& path);

/// Runs one command and returns its textual output (also written to
/// cfg.output_path when set).
std::string run_command(const RunConfig& cfg);

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numeric = 3, exit_io = 4 };

} // namespace mee
