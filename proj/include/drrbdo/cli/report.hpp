#ifndef DRRBDO_CLI_REPORT_HPP
#define DRRBDO_CLI_REPORT_HPP

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "drrbdo/robust/sequential.hpp"
#include "drrbdo/robust/uncertainty.hpp"
#include "drrbdo/truss/model.hpp"

namespace drrbdo::cli {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string csv_row(const std::vector<std::string>& cells);

nlohmann::json to_json(const truss::MarginBreakdown& m);
nlohmann::json to_json(const robust::OuterIterate& it);

/// Everything `verify` needs from a finished solve.
struct SolveReport {
  std::string mode;    // nominal | robust
  std::string status;  // optimal | converged | not-converged
  nlohmann::json model;
  std::optional<nlohmann::json> uncertainty;
  truss::DesignPoint design;
  std::optional<double> nominal_volume;
  std::optional<robust::RobustCertificate> certificate;
  std::optional<double> kappa;
  std::vector<robust::OuterIterate> iterations;

  nlohmann::json to_json(const truss::TrussModel& model) const;
  /// Throws ConfigurationError when required fields are missing or mistyped.
  static SolveReport from_json(const nlohmann::json& doc);
  static SolveReport load(const std::filesystem::path& path);
};

/// One line per design in the table layout x_1..x_n (mm^2), obj_val, pi.
std::string solution_csv(const truss::TrussModel& model, const truss::DesignPoint& design);

}  // namespace drrbdo::cli

#endif  // DRRBDO_CLI_REPORT_HPP
