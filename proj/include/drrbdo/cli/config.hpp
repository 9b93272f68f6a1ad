#ifndef DRRBDO_CLI_CONFIG_HPP
#define DRRBDO_CLI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "drrbdo/robust/uncertainty.hpp"

namespace drrbdo::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNotConverged = 3,
  kExitVerifyFailed = 4,
  kExitOracleFailed = 5,
};

struct RunConfig {
  std::string subcommand;  // solve | sweep | verify | oracle
  std::filesystem::path model;
  std::filesystem::path uncertainty;
  std::filesystem::path out = ".";
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::string> norm;
  std::optional<std::string> family;
  std::uint64_t seed = 1;
  std::int64_t outer = 200;
  std::int64_t inner = 20000;
  bool exact = false;
  std::vector<double> grid_eps;
  std::vector<double> grid_alpha;

  /// Throws ConfigurationError on missing files, bad counts or unsorted grids.
  void validate() const;

  /// solve runs the robust loop when an uncertainty file is given.
  bool robust() const;

  /// Uncertainty file with the command-line overrides applied.
  robust::UncertaintyConfig load_uncertainty(Eigen::Index members) const;
};

}  // namespace drrbdo::cli

#endif  // DRRBDO_CLI_CONFIG_HPP
