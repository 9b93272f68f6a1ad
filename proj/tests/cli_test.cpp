#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "drrbdo/cli/commands.hpp"
#include "drrbdo/cli/report.hpp"
#include "drrbdo/errors.hpp"
#include "test_paths.hpp"

namespace drrbdo::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("drrbdo_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig solve_config(const fs::path& out, const char* unc = nullptr) {
  RunConfig cfg;
  cfg.subcommand = "solve";
  cfg.model = test_paths::problem("two_bar.json");
  if (unc) cfg.uncertainty = test_paths::problem(unc);
  cfg.out = out;
  return cfg;
}

TEST(Config, Validation) {
  const auto out = scratch("validation");
  auto cfg = solve_config(out);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_FALSE(cfg.robust());

  auto bad = cfg;
  bad.subcommand = "optimize";
  EXPECT_THROW(bad.validate(), ConfigurationError);
  bad = cfg;
  bad.model = out / "missing.json";
  EXPECT_THROW(bad.validate(), ConfigurationError);
  bad = cfg;
  bad.epsilon = 0.05;  // override without a file
  EXPECT_THROW(bad.validate(), ConfigurationError);
  bad.uncertainty = test_paths::problem("unc_two_bar_linf.json");
  EXPECT_NO_THROW(bad.validate());
  bad.epsilon = 1.5;
  EXPECT_THROW(bad.validate(), ConfigurationError);
  bad = cfg;
  bad.uncertainty = test_paths::problem("unc_two_bar_linf.json");
  bad.norm = "l1";
  EXPECT_THROW(bad.validate(), ConfigurationError);

  auto sw = cfg;
  sw.subcommand = "sweep";
  EXPECT_THROW(sw.validate(), ConfigurationError);
  sw.uncertainty = test_paths::problem("unc_two_bar_linf.json");
  EXPECT_THROW(sw.validate(), ConfigurationError);
  sw.grid_eps = {0.1, 0.05, 0.05};
  EXPECT_THROW(sw.validate(), ConfigurationError);
  sw.grid_eps = {0.1, 0.05, 0.2};
  EXPECT_THROW(sw.validate(), ConfigurationError);
  sw.grid_eps = {0.01, 0.05, 0.1};
  EXPECT_NO_THROW(sw.validate());
  sw.grid_eps = {0.1, 0.05, 0.01};
  EXPECT_NO_THROW(sw.validate());

  auto mc = cfg;
  mc.subcommand = "verify";
  mc.inner = 0;
  EXPECT_THROW(mc.validate(), ConfigurationError);
}

TEST(Config, OverridesApply) {
  auto cfg = solve_config(".", "unc_two_bar_linf.json");
  cfg.epsilon = 0.05;
  cfg.norm = "l2";
  cfg.family = "all";
  cfg.alpha = 0.1;
  const auto unc = cfg.load_uncertainty(2);
  EXPECT_EQ(unc.reliability.epsilon, 0.05);
  EXPECT_EQ(unc.uncertainty.norm, robust::NormKind::kL2);
  EXPECT_EQ(unc.reliability.family, robust::DistributionFamily::kAll);
  EXPECT_EQ(unc.uncertainty.alpha, 0.1);
  EXPECT_THROW(cfg.load_uncertainty(29), ConfigurationError);
}

TEST(ExitCodes, MapErrors) {
  std::ostringstream log, err;
  RunConfig cfg;
  cfg.subcommand = "solve";
  cfg.model = "/nonexistent/model.json";
  EXPECT_EQ(run(cfg, log, err), kExitValidation);
  EXPECT_NE(err.str().find("not found"), std::string::npos);

  // a budget below the nominal compliance cannot absorb the worst-case mean shift
  const auto out = scratch("infeasible");
  cfg = solve_config(out, "unc_two_bar_linf.json");
  cfg.alpha = 1e6;
  EXPECT_EQ(run(cfg, log, err), kExitNotConverged);
  const auto doc = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(doc.at("status"), "failed");

  RunConfig verify;
  verify.subcommand = "verify";
  verify.out = scratch("no_report");
  EXPECT_EQ(run(verify, log, err), kExitValidation);
}

TEST(Report, RoundTrip) {
  const auto out = scratch("round_trip");
  std::ostringstream log, err;
  ASSERT_EQ(run(solve_config(out, "unc_two_bar_linf.json"), log, err), kExitOk) << err.str();
  const auto report = SolveReport::load(out / "report.json");
  EXPECT_EQ(report.mode, "robust");
  EXPECT_EQ(report.status, "converged");
  ASSERT_TRUE(report.certificate && report.kappa && report.nominal_volume && report.design.margin);
  EXPECT_FALSE(report.iterations.empty());
  const auto model = truss::TrussModel::from_json(report.model);
  const auto again = SolveReport::from_json(report.to_json(model));
  EXPECT_EQ(again.to_json(model), report.to_json(model));
  EXPECT_EQ(again.design.areas, report.design.areas);

  auto doc = nlohmann::json::parse(slurp(out / "report.json"));
  doc.erase("design");
  EXPECT_THROW(SolveReport::from_json(doc), ConfigurationError);

  const auto csv = slurp(out / "solution.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x1,x2,obj_val,pi");
}

TEST(Report, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3, 4.5e6, -2.5e-300, 0.0}) EXPECT_EQ(std::stod(format_number(v)), v);
  EXPECT_EQ(csv_row({"a", "b,c", "d\"e"}), "a,\"b,c\",\"d\"\"e\"\n");
}

TEST(Report, AtomicWriteReplacesWholeFile) {
  const auto dir = scratch("atomic");
  const auto path = dir / "file.txt";
  write_atomic(path, "first version, longer than the second\n");
  write_atomic(path, "second\n");
  EXPECT_EQ(slurp(path), "second\n");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1);
  write_atomic(dir / "nested" / "file.txt", "x");
  EXPECT_EQ(slurp(dir / "nested" / "file.txt"), "x");
}

TEST(Sweep, CsvParseAndResume) {
  std::vector<SweepRow> rows = {{"epsilon", 0.1, 4.6e6, "converged"}, {"alpha", 0.05, 4.55e6, "infeasible"}};
  const auto text = sweep_csv(rows);
  const auto back = parse_sweep_csv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].param_name, "epsilon");
  EXPECT_EQ(back[0].param_value, 0.1);
  EXPECT_EQ(back[1].volume, 4.55e6);
  EXPECT_EQ(back[1].status, "infeasible");
  // torn or malformed lines are dropped and recomputed on resume
  const auto torn = parse_sweep_csv(text + "epsilon,0.0\nalpha,x,1,converged\n");
  EXPECT_EQ(torn.size(), 2u);

  // converged rows in `done` are reused verbatim, others are recomputed
  const auto model = truss::TrussModel::load(test_paths::problem("two_bar.json"));
  const auto base = robust::UncertaintyConfig::load(test_paths::problem("unc_two_bar_linf.json"));
  std::vector<SweepRow> done = {{"epsilon", 0.05, 123.0, "converged"}, {"epsilon", 0.02, 456.0, "solver-failure"}};
  const auto resumed = sweep(model, base, {0.05, 0.02}, {}, done);
  ASSERT_EQ(resumed.size(), 2u);
  EXPECT_EQ(resumed[0].volume, 123.0);
  EXPECT_EQ(resumed[1].status, "converged");
  EXPECT_GT(resumed[1].volume, 4.5e6);
}

TEST(Reproducibility, OutputsAreByteIdentical) {
  std::ostringstream log, err;
  std::string first[3];
  for (int run_index = 0; run_index < 2; ++run_index) {
    const auto out = scratch("repro" + std::to_string(run_index));
    ASSERT_EQ(run(solve_config(out, "unc_two_bar_l2.json"), log, err), kExitOk) << err.str();
    RunConfig sw = solve_config(out, "unc_two_bar_l2.json");
    sw.subcommand = "sweep";
    sw.grid_eps = {0.1, 0.02};
    sw.grid_alpha = {0.1, 0.2};
    ASSERT_EQ(run(sw, log, err), kExitOk) << err.str();
    RunConfig mc;
    mc.subcommand = "verify";
    mc.out = out;
    mc.outer = 8;
    mc.inner = 2000;
    mc.seed = 17;
    ASSERT_EQ(run(mc, log, err), kExitOk) << err.str();
    const std::string files[3] = {"solution.csv", "sweep.csv", "verify.csv"};
    for (int f = 0; f < 3; ++f) {
      const auto text = slurp(out / files[f]);
      EXPECT_FALSE(text.empty());
      if (run_index == 0)
        first[f] = text;
      else
        EXPECT_EQ(text, first[f]) << files[f];
    }
  }
}

TEST(Verify, FailsWhenTheBudgetIsExceeded) {
  // the nominal design sits at pi = pi_bar, so half of all perturbations fail
  const auto out = scratch("verify_nominal");
  std::ostringstream log, err;
  ASSERT_EQ(run(solve_config(out), log, err), kExitOk);
  RunConfig mc;
  mc.subcommand = "verify";
  mc.out = out;
  mc.outer = 4;
  mc.inner = 2000;
  EXPECT_EQ(run(mc, log, err), kExitValidation);  // nominal report carries no uncertainty
  mc.uncertainty = test_paths::problem("unc_two_bar_linf.json");
  EXPECT_EQ(run(mc, log, err), kExitVerifyFailed);
  const auto summary = nlohmann::json::parse(slurp(out / "verify_summary.json"));
  EXPECT_FALSE(summary.at("pass").get<bool>());
  EXPECT_GT(summary.at("max").get<double>(), 0.2);
}

}  // namespace
}  // namespace drrbdo::cli
