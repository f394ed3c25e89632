// gkdv: solve, verify and sweep driver.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gkdv/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral lab for dissipative generalized KdV equations"};
  app.require_subcommand(1);

  std::string solve_config;
  auto* solve = app.add_subcommand("solve", "Picard fixed point on [0, T] for one configuration");
  solve->add_option("--config", solve_config, "JSON run configuration")->required();

  std::string verify_config;
  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run the estimate checks");
  verify->add_option("--config", verify_config, "JSON run configuration")->required();
  verify->add_option("--suite", suite, "all|linear|nonlinear|smoothing (default: from config)")
      ->check(CLI::IsMember({"all", "linear", "nonlinear", "smoothing"}));

  std::string sweep_config;
  std::size_t jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Cartesian sweep over k, p and s");
  sweep->add_option("--config", sweep_config, "JSON run configuration")->required();
  sweep->add_option("--jobs", jobs, "concurrent jobs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? gkdv::kExitOk : gkdv::kExitUsage;
  }

  try {
    if (*solve) return gkdv::cmd_solve(gkdv::load_config(solve_config), std::cout);
    if (*verify) {
      auto cfg = gkdv::load_config(verify_config);
      if (!suite.empty()) cfg.verify.suite = suite;
      return gkdv::cmd_verify(cfg, cfg.verify.suite, std::cout);
    }
    return gkdv::cmd_sweep(gkdv::load_config(sweep_config), jobs, std::cout);
  } catch (const gkdv::ConfigError& e) {
    std::cerr << "gkdv: configuration error: " << e.what() << "\n";
    return gkdv::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "gkdv: " << e.what() << "\n";
    return gkdv::kExitFailure;
  }
}
