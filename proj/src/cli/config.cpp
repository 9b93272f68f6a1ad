#include "drrbdo/cli/config.hpp"

#include <algorithm>

#include "drrbdo/errors.hpp"

namespace drrbdo::cli {

namespace {

void check_file(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::is_regular_file(path))
    throw ConfigurationError(std::string(what) + " file not found: " + path.string());
}

void check_grid(const std::vector<double>& grid, const char* name) {
  const bool ascending = std::adjacent_find(grid.begin(), grid.end(), std::greater_equal<>()) == grid.end();
  const bool descending = std::adjacent_find(grid.begin(), grid.end(), std::less_equal<>()) == grid.end();
  if (!ascending && !descending) throw ConfigurationError(std::string(name) + " must be strictly sorted");
}

}  // namespace

void RunConfig::validate() const {
  static const std::vector<std::string> known = {"solve", "sweep", "verify", "oracle"};
  if (std::find(known.begin(), known.end(), subcommand) == known.end())
    throw ConfigurationError("unknown subcommand '" + subcommand + "'");
  if (subcommand == "solve" || subcommand == "sweep") {
    if (model.empty()) throw ConfigurationError(subcommand + " needs --model");
    check_file(model, "model");
  }
  if (!uncertainty.empty()) check_file(uncertainty, "uncertainty");
  if (uncertainty.empty() && (epsilon || alpha || beta || norm || family) && subcommand != "verify")
    throw ConfigurationError("--eps, --alpha, --beta, --norm and --family override an uncertainty file; pass --unc");
  if (subcommand == "sweep" && uncertainty.empty()) throw ConfigurationError("sweep needs --unc");
  if (outer < 1 || inner < 1) throw ConfigurationError("--outer and --inner must be at least 1");
  if (epsilon && !(*epsilon > 0 && *epsilon < 1)) throw ConfigurationError("--eps must lie in (0, 1)");
  if (alpha && !(*alpha >= 0)) throw ConfigurationError("--alpha must be nonnegative");
  if (beta && !(*beta >= 0)) throw ConfigurationError("--beta must be nonnegative");
  if (norm) robust::norm_from_string(*norm);
  if (family) robust::family_from_string(*family);
  if (subcommand == "sweep" && grid_eps.empty() && grid_alpha.empty())
    throw ConfigurationError("sweep needs --grid-eps or --grid-alpha");
  check_grid(grid_eps, "--grid-eps");
  check_grid(grid_alpha, "--grid-alpha");
  for (double e : grid_eps)
    if (!(e > 0 && e < 1)) throw ConfigurationError("--grid-eps values must lie in (0, 1)");
  for (double a : grid_alpha)
    if (!(a >= 0)) throw ConfigurationError("--grid-alpha values must be nonnegative");
}

bool RunConfig::robust() const { return !uncertainty.empty(); }

robust::UncertaintyConfig RunConfig::load_uncertainty(Eigen::Index members) const {
  if (uncertainty.empty()) throw ConfigurationError("robust runs need --unc");
  robust::UncertaintyConfig cfg = robust::UncertaintyConfig::load(uncertainty);
  auto& u = cfg.uncertainty;
  if (epsilon) cfg.reliability.epsilon = *epsilon;
  if (alpha) u.alpha = *alpha;
  if (beta) u.beta = *beta;
  if (norm) u.norm = robust::norm_from_string(*norm);
  if (family) cfg.reliability.family = robust::family_from_string(*family);
  u.validate();
  if (u.dimension() != members)
    throw ConfigurationError("uncertainty has dimension " + std::to_string(u.dimension()) + " but the model has " +
                             std::to_string(members) + " members");
  return cfg;
}

}  // namespace drrbdo::cli
