// Command-line front end: harmavg {solve|verify|study} --config PATH.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "harmavg/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Iterated ball averaging for the Dirichlet problem"};
  app.require_subcommand(1);

  std::string config_path;
  std::string suite;
  std::string sweep;
  bool quiet = false;

  auto* solve = app.add_subcommand("solve", "Iterate to convergence and write outputs");
  solve->add_option("--config", config_path, "Run config file")->required();
  solve->add_flag("--quiet", quiet, "Suppress the summary line");

  auto* verify = app.add_subcommand("verify", "Run an invariant suite");
  verify->add_option("--config", config_path, "Run config file")->required();
  verify->add_option("--suite", suite, "lemma1, eq8, barrier, hull or fixedpoint")
      ->required()
      ->check(CLI::IsMember({"lemma1", "eq8", "barrier", "hull", "fixedpoint"}));
  verify->add_flag("--quiet", quiet, "Suppress per-check lines");

  auto* study = app.add_subcommand("study", "Sweep one parameter and tabulate");
  study->add_option("--config", config_path, "Run config file")->required();
  study->add_option("--sweep", sweep, "key=v1,v2,... over grid.nodes, radius.c, "
                                      "quadrature.samples_per_axis or quadrature.samples")
      ->required();
  study->add_flag("--quiet", quiet, "Suppress progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : harmavg::kExitError;
  }

  harmavg::RunConfig cfg;
  try {
    cfg = harmavg::load_config(config_path);
  } catch (const harmavg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return harmavg::kExitError;
  }

  harmavg::CommandOptions opts;
  opts.quiet = quiet;
  if (*solve) return harmavg::cmd_solve(cfg, opts);
  if (*verify) return harmavg::cmd_verify(cfg, suite, opts);
  return harmavg::cmd_study(cfg, sweep, opts);
}
