#ifndef DRRBDO_CLI_COMMANDS_HPP
#define DRRBDO_CLI_COMMANDS_HPP

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "drrbdo/cli/config.hpp"
#include "drrbdo/robust/sequential.hpp"

namespace drrbdo::cli {

struct SweepRow {
  std::string param_name;  // epsilon | alpha
  double param_value = 0;
  double volume = 0;
  std::string status;  // converged | not-converged | infeasible | solver-failure | invalid
};

/// Solves one robust problem per grid point. Alpha points scale beta with
/// alpha, keeping the base file's beta/alpha ratio. Rows already present in
/// `done` with status converged are reused.
std::vector<SweepRow> sweep(const truss::TrussModel& model, const robust::UncertaintyConfig& base,
                            const std::vector<double>& grid_eps, const std::vector<double>& grid_alpha,
                            const std::vector<SweepRow>& done = {},
                            const std::function<void(const std::vector<SweepRow>&)>& progress = {});

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

int run_solve(const RunConfig& cfg, std::ostream& log);
int run_sweep(const RunConfig& cfg, std::ostream& log);
int run_verify(const RunConfig& cfg, std::ostream& log);
int run_oracle(const RunConfig& cfg, std::ostream& log);

/// Validates, dispatches on cfg.subcommand and maps errors to exit codes.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace drrbdo::cli

#endif  // DRRBDO_CLI_COMMANDS_HPP
