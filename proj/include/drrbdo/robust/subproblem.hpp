#ifndef DRRBDO_ROBUST_SUBPROBLEM_HPP
#define DRRBDO_ROBUST_SUBPROBLEM_HPP

#include <optional>
#include <stdexcept>

#include "drrbdo/conic/cone.hpp"
#include "drrbdo/robust/margin.hpp"
#include "drrbdo/truss/model.hpp"

namespace drrbdo::robust {

/// The budget's constant part already exceeds the compliance bound, so no
/// design can satisfy the robust constraint at this linearization.
class InfeasibleBudgetError : public std::runtime_error {
 public:
  InfeasibleBudgetError(const std::string& what, double pi_bar, double worst_mean)
      : std::runtime_error(what), pi_bar(pi_bar), worst_mean(worst_mean) {}
  double pi_bar;
  double worst_mean;
};

/// Where each block of decision variables sits in the program.
struct VariableMap {
  Index x = 0;   // n areas, design units
  Index s = -1;  // compliance epigraph (absent in nominal mode)
  Index z = -1;
  Index w = -1;  // svec(W)
  Index num_members = 0;
  bool nominal() const { return s < 0; }
};

/// One conic subproblem. The objective is volume / objective_scale.
struct Subproblem {
  conic::ConeProgram<double> program;
  VariableMap map;
  double objective_scale = 1;
  // robust mode: data needed to report the margin breakdown
  VectorXd h;
  std::optional<MomentUncertainty> uncertainty;
  ReliabilitySpec reliability;
  double pi_bar = 0;  // compliance units
};

/// min c.x s.t. x >= x_min, [[K(x), p], [p^T, s]] psd,
///   s + worst mean + Sigma~ . W + beta ||B^T W B|| + kappa^2 z <= pi_bar,
///   [[W, h/2], [h^T/2, z]] psd,
/// with h the compliance gradient at the linearization point. Requires
/// epsilon < 0.5. Throws InfeasibleBudgetError when the constant terms alone
/// exceed pi_bar.
Subproblem assemble_subproblem(const truss::TrussModel& model, const VectorXd& h, const MomentUncertainty& unc,
                               const ReliabilitySpec& spec);

/// Compliance-constrained minimum volume: the exact LMI with s = pi_bar.
Subproblem assemble_nominal(const truss::TrussModel& model);

struct SubproblemResult {
  VectorXd areas;
  double s = 0;
  std::optional<RobustCertificate> certificate;  // robust mode only
  conic::ConeSolution<double> solution;
};

/// Solves and decodes; throws SolverError unless the solver reports optimal.
SubproblemResult solve_subproblem(const Subproblem& sub, const truss::TrussModel& model,
                                  const conic::SolverSettings& settings = {});

/// Nominal optimum as a design point.
truss::DesignPoint solve_nominal(const truss::TrussModel& model, const conic::SolverSettings& settings = {});

}  // namespace drrbdo::robust

#endif  // DRRBDO_ROBUST_SUBPROBLEM_HPP
