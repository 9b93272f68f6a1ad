#include <CLI11.hpp>
#include <iostream>

#include "drrbdo/cli/commands.hpp"

int main(int argc, char** argv) {
  drrbdo::cli::RunConfig cfg;
  CLI::App app{"Volume-minimal truss design under distributionally robust reliability constraints"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "Truss model JSON");
    sub->add_option("--unc", cfg.uncertainty, "Uncertainty JSON");
    sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    sub->add_option("--eps", cfg.epsilon, "Target failure probability");
    sub->add_option("--alpha", cfg.alpha, "Mean uncertainty magnitude");
    sub->add_option("--beta", cfg.beta, "Covariance uncertainty magnitude");
    sub->add_option("--norm", cfg.norm, "linf | l2")->check(CLI::IsMember({"linf", "l2"}));
    sub->add_option("--family", cfg.family, "gaussian | all")->check(CLI::IsMember({"gaussian", "all"}));
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  };
  auto* solve = app.add_subcommand("solve", "Nominal solve, or robust solve when --unc is given");
  add_common(solve);
  auto* sweep = app.add_subcommand("sweep", "Robust solves over an epsilon or alpha grid");
  add_common(sweep);
  sweep->add_option("--grid-eps", cfg.grid_eps, "Comma-separated epsilon values")->delimiter(',');
  sweep->add_option("--grid-alpha", cfg.grid_alpha, "Comma-separated alpha values (beta scales with alpha)")
      ->delimiter(',');
  auto* verify = app.add_subcommand("verify", "Double-loop Monte Carlo check of the design in --out");
  add_common(verify);
  verify->add_option("--outer", cfg.outer, "Moment samples")->capture_default_str();
  verify->add_option("--inner", cfg.inner, "Input samples per moment draw")->capture_default_str();
  verify->add_flag("--exact", cfg.exact, "Re-solve the structure per sample");
  auto* oracle = app.add_subcommand("oracle", "Duality oracle batteries");
  add_common(oracle);
  oracle->add_option("--inner", cfg.inner, "Samples per variance-duality instance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : drrbdo::cli::kExitValidation;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  return drrbdo::cli::run(cfg, std::cout, std::cerr);
}
