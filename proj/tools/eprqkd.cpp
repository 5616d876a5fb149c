// eprqkd: EPR-pair key distribution simulator and parameter calculator.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "eprqkd/cli.hpp"

namespace cli = eprqkd::cli;

int main(int argc, char** argv) {
  CLI::App app{"EPR-pair quantum key distribution simulator"};
  app.require_subcommand(1);

  cli::BoundsArgs bounds;
  std::string epsilon_grid;
  auto* bounds_cmd = app.add_subcommand("bounds", "Security-parameter table");
  bounds_cmd->add_option("--epsilon", bounds.epsilon, "Error-rate threshold")->capture_default_str();
  bounds_cmd->add_option("--tau", bounds.tau, "Security constant")->capture_default_str();
  bounds_cmd->add_option("--tau-s", bounds.tau_s, "Sifting margin constant")->capture_default_str();
  bounds_cmd->add_option("--r", bounds.r, "Reconciled-set size")->capture_default_str();
  bounds_cmd->add_option("--m", bounds.m, "Key length")->capture_default_str();
  bounds_cmd->add_option("--epsilon-grid", epsilon_grid,
                         "Also tabulate the net-gain margin over start:stop:step or a list");

  cli::GenmatArgs genmat;
  auto* genmat_cmd = app.add_subcommand("genmat", "Generate a privacy-amplification matrix");
  genmat_cmd->add_option("--m", genmat.m, "Rows (key length)")->required();
  genmat_cmd->add_option("--r", genmat.r, "Columns (reconciled-set size)")->required();
  genmat_cmd->add_option("--dk", genmat.d_k, "Minimum row-combination weight")->required();
  genmat_cmd->add_option("--seed", genmat.seed, "Random seed")->capture_default_str();
  genmat_cmd->add_option("--attempts", genmat.attempts, "Rejection budget")->capture_default_str();
  genmat_cmd->add_option("--out", genmat.out_path, "Output path (default stdout)");

  std::string verify_path;
  std::optional<std::size_t> verify_dk;
  auto* verify_cmd = app.add_subcommand("verify", "Exhaustively verify a matrix file");
  verify_cmd->add_option("matrix", verify_path, "Matrix file")->required();
  verify_cmd->add_option("--dk", verify_dk, "Required minimum weight");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sessions;
  std::optional<std::string> out_path;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Run configuration file")->required();
    cmd->add_option("--seed", seed, "Master seed override");
    cmd->add_option("--sessions", sessions, "Session count override");
    cmd->add_option("--out", out_path, "CSV output path override");
  };
  auto* run_cmd = app.add_subcommand("run", "Run protocol sessions, emit one CSV row each");
  add_run_flags(run_cmd);

  std::string parameter;
  std::string grid;
  auto* sweep_cmd = app.add_subcommand("sweep", "Aggregate sessions over a parameter grid");
  add_run_flags(sweep_cmd);
  sweep_cmd->add_option("--parameter", parameter,
                        "epsilon, tau, r, intercept_probability or delta")
      ->required();
  sweep_cmd->add_option("--grid", grid, "Comma list or start:stop:step")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfigError;
  }

  const cli::RunOverrides overrides{seed, sessions, out_path};
  if (bounds_cmd->parsed()) {
    if (!epsilon_grid.empty()) bounds.epsilon_grid = epsilon_grid;
    return cli::cmd_bounds(bounds, std::cout, std::cerr);
  }
  if (genmat_cmd->parsed()) return cli::cmd_genmat(genmat, std::cout, std::cerr);
  if (verify_cmd->parsed()) return cli::cmd_verify(verify_path, verify_dk, std::cout, std::cerr);
  if (run_cmd->parsed()) return cli::cmd_run(config_path, overrides, std::cout, std::cerr);
  return cli::cmd_sweep(config_path, parameter, grid, overrides, std::cout, std::cerr);
}
