#include "drrbdo/cli/commands.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "drrbdo/cli/report.hpp"
#include "drrbdo/errors.hpp"
#include "drrbdo/verify/monte_carlo.hpp"
#include "drrbdo/verify/oracles.hpp"

namespace drrbdo::cli {

namespace fs = std::filesystem;

std::vector<SweepRow> sweep(const truss::TrussModel& model, const robust::UncertaintyConfig& base,
                            const std::vector<double>& grid_eps, const std::vector<double>& grid_alpha,
                            const std::vector<SweepRow>& done,
                            const std::function<void(const std::vector<SweepRow>&)>& progress) {
  std::vector<SweepRow> rows;
  for (double e : grid_eps) rows.push_back({"epsilon", e, 0, ""});
  for (double a : grid_alpha) rows.push_back({"alpha", a, 0, ""});
  for (auto& row : rows)
    for (const auto& d : done)
      if (d.status == "converged" && d.param_name == row.param_name &&
          format_number(d.param_value) == format_number(row.param_value))
        row = d;

  const double ratio = base.uncertainty.alpha > 0 ? base.uncertainty.beta / base.uncertainty.alpha : 0;
  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= rows.size()) return;
      if (!rows[i].status.empty()) continue;
      robust::UncertaintyConfig cfg = base;
      if (rows[i].param_name == "epsilon") {
        cfg.reliability.epsilon = rows[i].param_value;
      } else {
        cfg.uncertainty.alpha = rows[i].param_value;
        if (base.uncertainty.alpha > 0) cfg.uncertainty.beta = ratio * rows[i].param_value;
      }
      SweepRow result = rows[i];
      try {
        const auto r = robust::sequential_sdp(model, cfg.uncertainty, cfg.reliability);
        result.volume = r.design.volume;
        result.status = robust::to_string(r.status);
      } catch (const robust::InfeasibleBudgetError&) {
        result.status = "infeasible";
      } catch (const SolverError&) {
        result.status = "solver-failure";
      } catch (const DomainError&) {
        result.status = "invalid";
      }
      std::lock_guard lock(mutex);
      rows[i] = result;
      if (progress) progress(rows);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), unsigned(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string text = csv_row({"param_name", "param_value", "volume", "status"});
  for (const auto& r : rows)
    if (!r.status.empty())
      text += csv_row({r.param_name, format_number(r.param_value), format_number(r.volume), r.status});
  return text;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::vector<SweepRow> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) continue;
    try {
      rows.push_back({cells[0], std::stod(cells[1]), std::stod(cells[2]), cells[3]});
    } catch (const std::exception&) {
      // a torn or hand-edited line is simply recomputed
    }
  }
  return rows;
}

int run_solve(const RunConfig& cfg, std::ostream& log) {
  const auto model = truss::TrussModel::load(cfg.model);
  SolveReport report;
  report.model = model.to_json();
  int code = kExitOk;
  if (!cfg.robust()) {
    report.mode = "nominal";
    report.status = "optimal";
    try {
      report.design = robust::solve_nominal(model);
    } catch (const SolverError& e) {
      log << "nominal solve failed: " << e.what() << "\n";
      write_atomic(cfg.out / "report.json",
                   nlohmann::json{{"mode", "nominal"}, {"status", "failed"}, {"error", e.what()}}.dump(2) + "\n");
      return kExitNotConverged;
    }
  } else {
    const auto unc = cfg.load_uncertainty(model.num_members());
    report.mode = "robust";
    report.uncertainty = unc.to_json();
    report.kappa = robust::kappa(unc.reliability);
    robust::SequentialResult result;
    try {
      result = robust::sequential_sdp(model, unc.uncertainty, unc.reliability);
    } catch (const std::exception& e) {
      if (!dynamic_cast<const SolverError*>(&e) && !dynamic_cast<const robust::InfeasibleBudgetError*>(&e)) throw;
      log << "robust solve failed: " << e.what() << "\n";
      write_atomic(cfg.out / "report.json",
                   nlohmann::json{{"mode", "robust"}, {"status", "failed"}, {"error", e.what()}}.dump(2) + "\n");
      return kExitNotConverged;
    }
    report.status = robust::to_string(result.status);
    report.design = result.design;
    report.nominal_volume = result.nominal.volume;
    report.certificate = result.certificate;
    report.iterations = result.log;
    if (!result.converged()) code = kExitNotConverged;
  }
  write_atomic(cfg.out / "report.json", report.to_json(model).dump(2) + "\n");
  write_atomic(cfg.out / "solution.csv", solution_csv(model, report.design));

  log << report.mode << " " << report.status << "\n";
  log << "areas (mm^2):";
  for (double a : report.design.areas) log << " " << a * model.area_unit();
  log << "\nvolume " << report.design.volume << " mm^3, compliance " << report.design.compliance << "\n";
  if (report.nominal_volume)
    log << "volume / nominal " << report.design.volume / *report.nominal_volume << ", outer iterations "
        << report.iterations.size() << ", margin " << report.design.margin->total() << "\n";
  return code;
}

int run_sweep(const RunConfig& cfg, std::ostream& log) {
  const auto model = truss::TrussModel::load(cfg.model);
  const auto base = cfg.load_uncertainty(model.num_members());
  const fs::path path = cfg.out / "sweep.csv";
  std::vector<SweepRow> done;
  if (fs::exists(path)) {
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    done = parse_sweep_csv(text.str());
  }
  const auto rows = sweep(model, base, cfg.grid_eps, cfg.grid_alpha, done,
                          [&](const std::vector<SweepRow>& partial) { write_atomic(path, sweep_csv(partial)); });
  write_atomic(path, sweep_csv(rows));
  int code = kExitOk;
  for (const auto& r : rows) {
    log << r.param_name << " = " << r.param_value << ": volume " << r.volume << " (" << r.status << ")\n";
    if (r.status != "converged") code = kExitNotConverged;
  }
  return code;
}

int run_verify(const RunConfig& cfg, std::ostream& log) {
  const auto report = SolveReport::load(cfg.out / "report.json");
  const auto model = truss::TrussModel::from_json(report.model);
  robust::UncertaintyConfig unc;
  if (!cfg.uncertainty.empty()) {
    unc = cfg.load_uncertainty(model.num_members());
  } else {
    if (!report.uncertainty) throw ConfigurationError("nominal report has no uncertainty; pass --unc");
    unc = robust::UncertaintyConfig::from_json(*report.uncertainty);
    if (cfg.epsilon) unc.reliability.epsilon = *cfg.epsilon;
    if (cfg.alpha) unc.uncertainty.alpha = *cfg.alpha;
    if (cfg.beta) unc.uncertainty.beta = *cfg.beta;
    if (cfg.norm) unc.uncertainty.norm = robust::norm_from_string(*cfg.norm);
    if (cfg.family) unc.reliability.family = robust::family_from_string(*cfg.family);
  }
  verify::McConfig mc;
  mc.outer_samples = cfg.outer;
  mc.inner_samples = cfg.inner;
  mc.seed = cfg.seed;
  mc.exact = cfg.exact;
  const auto result = verify::double_loop(model, report.design.areas, unc.uncertainty, unc.reliability, mc);
  const double eps = unc.reliability.epsilon;
  const double threshold = verify::certification_threshold(eps, mc.inner_samples);

  const Eigen::Index n = model.num_members();
  std::vector<std::string> header{"sample_id"};
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("mu_" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) header.push_back("sigma_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  header.insert(header.end(), {"failure_prob", "skipped"});
  std::string csv = csv_row(header);
  for (std::size_t s = 0; s < result.estimates.size(); ++s) {
    std::vector<std::string> row{std::to_string(s)};
    const auto& m = result.moments[s];
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(format_number(m.mu(i)));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) row.push_back(format_number(m.sigma(i, j)));
    row.push_back(format_number(result.estimates[s].probability));
    row.push_back(std::to_string(result.estimates[s].skipped));
    csv += csv_row(row);
  }
  write_atomic(cfg.out / "verify.csv", csv);

  const bool pass = result.max <= threshold;
  nlohmann::json summary{{"max", result.max},
                         {"mean", result.mean},
                         {"epsilon", eps},
                         {"threshold", threshold},
                         {"pass", pass},
                         {"outer_samples", mc.outer_samples},
                         {"inner_samples", mc.inner_samples},
                         {"seed", mc.seed},
                         {"exact", mc.exact},
                         {"skipped", result.skipped},
                         {"histogram",
                          {{"edges", result.histogram.edges},
                           {"counts", result.histogram.counts},
                           {"overflow", result.histogram.overflow}}}};
  write_atomic(cfg.out / "verify_summary.json", summary.dump(2) + "\n");
  log << "max failure probability " << result.max << " (mean " << result.mean << ", threshold " << threshold
      << ") over " << mc.outer_samples << " x " << mc.inner_samples << " samples: " << (pass ? "pass" : "FAIL")
      << "\n";
  return pass ? kExitOk : kExitVerifyFailed;
}

int run_oracle(const RunConfig& cfg, std::ostream& log) {
  int failures = 0;

  const auto closed = verify::worst_variance_battery(200, cfg.seed);
  std::string csv = csv_row({"instance", "side", "kappa", "closed_form", "sdp_value", "gap", "pass"});
  double closed_max = 0;
  for (std::size_t i = 0; i < closed.size(); ++i) {
    const auto& r = closed[i].result;
    closed_max = std::max(closed_max, r.gap());
    failures += !r.agrees();
    csv += csv_row({std::to_string(i), std::to_string(closed[i].g.size()), format_number(closed[i].kappa),
                    format_number(r.closed_form), format_number(r.sdp_value), format_number(r.gap()),
                    r.agrees() ? "true" : "false"});
  }
  write_atomic(cfg.out / "oracle_worst_variance.csv", csv);

  const auto var = verify::variance_battery(24, cfg.inner, cfg.seed);
  csv = csv_row({"instance", "side", "norm", "beta", "sampled_max", "dual_min", "gap", "pass"});
  double var_max = 0;
  int sandwich_failures = 0;
  for (std::size_t i = 0; i < var.size(); ++i) {
    const auto& v = var[i];
    bool ok = v.result.sandwich();
    if (v.uncertainty.beta == 0)
      ok = ok && std::abs(v.result.dual_min - v.result.sampled_max) <= 1e-7 * (1 + std::abs(v.result.dual_min));
    sandwich_failures += !ok;
    var_max = std::max(var_max, v.result.gap);
    csv += csv_row({std::to_string(i), std::to_string(v.lambda.rows()), robust::to_string(v.uncertainty.norm),
                    format_number(v.uncertainty.beta), format_number(v.result.sampled_max),
                    format_number(v.result.dual_min), format_number(v.result.gap), ok ? "true" : "false"});
  }
  write_atomic(cfg.out / "oracle_variance.csv", csv);
  failures += sandwich_failures;

  // sampled maximum approaching the dual value on one fixed side-2 instance
  Eigen::MatrixXd sigma(2, 2), lambda(2, 2);
  sigma << 0.7, 0.2, 0.2, 0.7;
  lambda << 1.5, -0.7, -0.7, 0.4;
  const auto unc = robust::MomentUncertainty::isotropic(Eigen::VectorXd::Zero(2), sigma, 0, 0.2, robust::NormKind::kLinf);
  csv = csv_row({"samples", "sampled_max", "dual_min", "gap"});
  auto table = nlohmann::json::array();
  for (std::int64_t samples : {100, 1000, 10000, 100000}) {
    verify::Rng rng = verify::Rng::substream(cfg.seed, std::uint64_t(samples));
    const auto r = verify::variance_duality_oracle(lambda, unc, samples, rng);
    csv += csv_row({std::to_string(samples), format_number(r.sampled_max), format_number(r.dual_min),
                    format_number(r.gap)});
    table.push_back({{"samples", samples}, {"gap", r.gap}});
  }
  write_atomic(cfg.out / "oracle_gap_vs_samples.csv", csv);

  nlohmann::json summary{
      {"worst_variance", {{"instances", closed.size()}, {"failures", failures - sandwich_failures}, {"max_gap", closed_max}}},
      {"variance_duality",
       {{"instances", var.size()}, {"failures", sandwich_failures}, {"max_gap", var_max}, {"samples", cfg.inner}}},
      {"gap_vs_samples", table},
      {"pass", failures == 0}};
  write_atomic(cfg.out / "oracle.json", summary.dump(2) + "\n");
  log << "worst-case variance battery: " << closed.size() << " instances, max gap " << closed_max << "\n"
      << "variance duality battery: " << var.size() << " instances, " << sandwich_failures << " failures\n";
  return failures ? kExitOracleFailed : kExitOk;
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    cfg.validate();
    if (cfg.subcommand == "solve") return run_solve(cfg, log);
    if (cfg.subcommand == "sweep") return run_sweep(cfg, log);
    if (cfg.subcommand == "verify") return run_verify(cfg, log);
    return run_oracle(cfg, log);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace drrbdo::cli
