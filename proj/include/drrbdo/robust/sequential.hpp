#ifndef DRRBDO_ROBUST_SEQUENTIAL_HPP
#define DRRBDO_ROBUST_SEQUENTIAL_HPP

#include <vector>

#include "drrbdo/conic/cone.hpp"
#include "drrbdo/robust/margin.hpp"
#include "drrbdo/robust/subproblem.hpp"
#include "drrbdo/truss/analysis.hpp"

namespace drrbdo::robust {

struct SequentialSettings {
  int max_iterations = 100;
  /// Stop when ||x_{k+1} - x_k||inf / ||x_k||inf falls to this.
  double tolerance = 1e-5;
  conic::SolverSettings solver;
};

struct OuterIterate {
  int iteration = 0;
  VectorXd areas;
  double volume = 0;
  double compliance = 0;  // true compliance at the new design
  double epigraph = 0;    // s from the subproblem
  double relative_change = 0;
  double margin = 0;  // subproblem certificate margin with the true compliance
  int solver_iterations = 0;
};

enum class SequentialStatus { kConverged, kNotConverged };
std::string to_string(SequentialStatus status);

struct SequentialResult {
  SequentialStatus status = SequentialStatus::kNotConverged;
  truss::DesignPoint nominal;
  /// Final design, with margin filled from the audit below.
  truss::DesignPoint design;
  /// Tight certificate at the final design's own gradient.
  RobustCertificate certificate;
  std::vector<OuterIterate> log;
  bool converged() const { return status == SequentialStatus::kConverged; }
};

/// Starts at the nominal optimum and repeatedly solves the robust subproblem
/// linearized at the current design. Requires epsilon < 0.5.
SequentialResult sequential_sdp(const truss::TrussModel& model, const MomentUncertainty& unc,
                                const ReliabilitySpec& spec, const SequentialSettings& settings = {});

}  // namespace drrbdo::robust

#endif  // DRRBDO_ROBUST_SEQUENTIAL_HPP
