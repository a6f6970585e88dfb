#include "mee/cli_io.hpp"
#include "mee/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  CLI::App app{"Minimum error entropy regression toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;

  const char* names[] = {"fit", "entropy", "oracle", "counterexample", "sweep", "concentration", "generate"};
  const char* help[] = {
      "fit a hypothesis by multi-start projected gradient",
      "empirical information error of a hypothesis on a sample",
      "population entropy functional of a hypothesis",
      "closed-form decomposition for the two-interval model",
      "consistency sweep over sample sizes and seeds",
      "sample-error concentration table",
      "sample a dataset as CSV x,y",
  };
  for (std::size_t i = 0; i < std::size(names); ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "config file (key = value lines)")->required();
    sub->add_option("--out", out_path, "output path (stdout when omitted)");
    sub->add_option("--seed", seed, "global seed, overrides the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mee::exit_config;
  }

  try {
    const auto command = mee::parse_command(app.get_subcommands().front()->get_name());
    mee::RunConfig cfg = mee::read_config(config_path, command);
    if (seed) {
      cfg.seed = *seed;
      cfg.fit.seed = *seed;
    }
    if (!out_path.empty()) cfg.output_path = out_path;
    const std::string out = mee::run_command(cfg);
    if (cfg.output_path.empty()) std::fwrite(out.data(), 1, out.size(), stdout);
    return mee::exit_ok;
  } catch (const mee::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return mee::exit_config;
  } catch (const mee::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return mee::exit_io;
  } catch (const mee::Error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return mee::exit_numeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mee::exit_numeric;
  }
}
