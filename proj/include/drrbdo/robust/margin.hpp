#ifndef DRRBDO_ROBUST_MARGIN_HPP
#define DRRBDO_ROBUST_MARGIN_HPP

#include <Eigen/Dense>

#include "drrbdo/conic/builder.hpp"
#include "drrbdo/conic/cone.hpp"
#include "drrbdo/robust/reliability.hpp"
#include "drrbdo/robust/uncertainty.hpp"
#include "drrbdo/truss/analysis.hpp"

namespace drrbdo::robust {

using truss::MarginBreakdown;

/// First-order model g(x) + grad . zeta of a performance function at the
/// current design.
struct LinearizedConstraint {
  double value = 0;
  VectorXd gradient;
};

/// g + grad . mu + kappa sqrt(grad^T Sigma grad). Throws StructuralError if
/// Sigma is asymmetric or sized wrongly.
double deterministic_margin(const LinearizedConstraint& con, const VectorXd& mu, const MatrixXd& sigma, double kappa);

/// max over mu in U_mu of grad . mu.
double worst_mean_term(const LinearizedConstraint& con, const MomentUncertainty& unc);

/// Dual certificate of the worst-case variance term.
struct RobustCertificate {
  double z = 0;
  MatrixXd W;
  MarginBreakdown margin;
};

/// Left side of the robust budget at fixed (W, z), split into its terms.
MarginBreakdown robust_margin(const LinearizedConstraint& con, const MomentUncertainty& unc,
                              const ReliabilitySpec& spec, const MatrixXd& W, double z);

/// Minimizes Sigma~ . W + beta ||B^T W B|| + kappa^2 z over
/// [[W, grad/2], [grad^T/2, z]] psd and returns the tight certificate.
/// Throws SolverError when the conic solve fails.
RobustCertificate worst_case_certificate(const LinearizedConstraint& con, const MomentUncertainty& unc,
                                         const ReliabilitySpec& spec, const conic::SolverSettings& settings = {});

/// Variables and cost of the worst-case variance term inside a larger program.
struct VarianceTerm {
  Index w = 0;  // first svec(W) variable
  Index z = 0;
  /// Sigma~ . W + beta * penalty + kappa^2 z
  conic::Affine cost;
};

/// Adds W, z, the block [[W, grad/2], [grad^T/2, z]] psd and the norm
/// auxiliaries to `builder`.
VarianceTerm add_variance_term(conic::ProgramBuilder& builder, const VectorXd& gradient,
                               const MomentUncertainty& unc, double kappa);

/// Epigraph of ||B^T (C + smat(w)) B|| in the dual norm of `norm`, with w the
/// svec variables starting at `w`. Returns the affine upper bound. The
/// linf case bounds only the lower triangle and doubles off-diagonal weights.
conic::Affine add_norm_epigraph(conic::ProgramBuilder& builder, NormKind norm, const MatrixXd& B,
                                const MatrixXd& constant, Index w);

}  // namespace drrbdo::robust

#endif  // DRRBDO_ROBUST_MARGIN_HPP
