#ifndef DRRBDO_TRUSS_ANALYSIS_HPP
#define DRRBDO_TRUSS_ANALYSIS_HPP

#include <optional>

#include "drrbdo/truss/model.hpp"

namespace drrbdo::truss {

/// K(x) = sum_j x_j K_j over the free DOFs. Throws StructuralError on a
/// negative area or wrong length.
MatrixXd assemble(const TrussModel& model, const VectorXd& areas);

/// Element stiffness K_j for a unit design value.
MatrixXd element_stiffness(const TrussModel& model, Index j);

struct StaticResponse {
  VectorXd displacement;  // mm
  double compliance = 0;  // compliance units
  VectorXd gradient;      // d compliance / d x_j, compliance units per design unit
};

/// Solves K(x) u = p once and evaluates compliance and its gradient
/// -u^T K_j u. Throws MechanismError when K(x) is singular.
StaticResponse analyze(const TrussModel& model, const VectorXd& areas);

double compliance(const TrussModel& model, const VectorXd& areas);
VectorXd compliance_gradient(const TrussModel& model, const VectorXd& areas);
/// Structural volume in mm^3.
double volume(const TrussModel& model, const VectorXd& areas);

/// Worst-case robust margin components for a design (compliance units).
struct MarginBreakdown {
  double deterministic = 0;    // g = pi(x) - pi_bar
  double worst_mean = 0;       // grad . mu~ + alpha * ||A^T grad||
  double sigma_dot_w = 0;      // Sigma~ . W
  double norm_penalty = 0;     // beta * ||B^T W B||
  double kappa_sq_z = 0;       // kappa^2 z
  double total() const { return deterministic + worst_mean + sigma_dot_w + norm_penalty + kappa_sq_z; }
};

struct DesignPoint {
  VectorXd areas;  // design units
  double volume = 0;
  double compliance = 0;
  VectorXd gradient;
  std::optional<MarginBreakdown> margin;
};

/// Evaluates volume, compliance and gradient at `areas`; requires areas >= x_min.
DesignPoint evaluate_design(const TrussModel& model, const VectorXd& areas);

}  // namespace drrbdo::truss

#endif  // DRRBDO_TRUSS_ANALYSIS_HPP
