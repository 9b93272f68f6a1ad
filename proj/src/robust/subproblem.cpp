#include "drrbdo/robust/subproblem.hpp"

#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "drrbdo/conic/solver.hpp"
#include "drrbdo/conic/symmetric.hpp"
#include "drrbdo/errors.hpp"
#include "drrbdo/truss/analysis.hpp"

namespace drrbdo::robust {

namespace {

// Bounds, objective and the compliance LMI; returns the builder with x
// allocated first and, in robust mode, s right after it.
conic::ProgramBuilder start_program(const truss::TrussModel& model, bool robust, Subproblem& sub) {
  const Index n = model.num_members();
  const Index d = model.num_free_dofs();
  conic::ProgramBuilder builder;
  sub.map.num_members = n;
  sub.map.x = builder.add_variables(n);
  if (robust) sub.map.s = builder.add_variables(1);

  const VectorXd c = model.volume_coefficients();
  sub.objective_scale = c.maxCoeff();
  for (Index j = 0; j < n; ++j) {
    builder.add_objective(sub.map.x + j, c(j) / sub.objective_scale);
    builder.add_nonneg(conic::Affine{-model.lower_bounds()(j), {}}.add(sub.map.x + j, 1));
  }

  // [[K(x)/ks, p/sqrt(cu ks)], [., s]] keeps the compliance in compliance units
  std::vector<MatrixXd> ks(static_cast<std::size_t>(n));
  VectorXd diag = VectorXd::Zero(d);
  for (Index j = 0; j < n; ++j) {
    ks[std::size_t(j)] = truss::element_stiffness(model, j);
    diag += ks[std::size_t(j)].diagonal();
  }
  const double scale = diag.maxCoeff();
  MatrixXd constant = MatrixXd::Zero(d + 1, d + 1);
  const VectorXd p = model.load() / std::sqrt(model.compliance_unit() * scale);
  constant.topRightCorner(d, 1) = p;
  constant.bottomLeftCorner(1, d) = p.transpose();
  if (!robust) constant(d, d) = model.compliance_bound();
  std::vector<std::pair<Index, MatrixXd>> terms;
  for (Index j = 0; j < n; ++j) {
    MatrixXd m = MatrixXd::Zero(d + 1, d + 1);
    m.topLeftCorner(d, d) = ks[std::size_t(j)] / scale;
    terms.emplace_back(sub.map.x + j, std::move(m));
  }
  if (robust) {
    MatrixXd m = MatrixXd::Zero(d + 1, d + 1);
    m(d, d) = 1;
    terms.emplace_back(sub.map.s, std::move(m));
  }
  builder.add_psd(constant, terms);
  return builder;
}

}  // namespace

Subproblem assemble_nominal(const truss::TrussModel& model) {
  Subproblem sub;
  sub.pi_bar = model.compliance_bound();
  sub.program = start_program(model, false, sub).build();
  return sub;
}

Subproblem assemble_subproblem(const truss::TrussModel& model, const VectorXd& h, const MomentUncertainty& unc,
                               const ReliabilitySpec& spec) {
  if (h.size() != model.num_members() || unc.dimension() != model.num_members())
    throw StructuralError("subproblem: gradient and uncertainty must have one entry per member");
  const double k = robust_kappa(spec);
  Subproblem sub;
  sub.h = h;
  sub.uncertainty = unc;
  sub.reliability = spec;
  sub.pi_bar = model.compliance_bound();

  const double mean = worst_mean_term({0, h}, unc);
  const double available = sub.pi_bar - mean;
  if (!(available > 0)) {
    std::ostringstream msg;
    msg << "robust budget infeasible: worst-case mean term " << mean << " exceeds the compliance bound "
        << sub.pi_bar;
    throw InfeasibleBudgetError(msg.str(), sub.pi_bar, mean);
  }

  conic::ProgramBuilder builder = start_program(model, true, sub);
  const VarianceTerm term = add_variance_term(builder, h, unc, k);
  sub.map.w = term.w;
  sub.map.z = term.z;
  conic::Affine budget = term.cost.scaled(-1);
  budget.constant += available;
  budget.add(sub.map.s, -1);
  builder.add_nonneg(budget);
  sub.program = builder.build();
  return sub;
}

SubproblemResult solve_subproblem(const Subproblem& sub, const truss::TrussModel& model,
                                  const conic::SolverSettings& settings) {
  SubproblemResult result;
  result.solution = conic::solve(sub.program, settings);
  if (!result.solution.optimal())
    throw SolverError("subproblem: conic solve ended with status " + to_string(result.solution.status) + " after " +
                      std::to_string(result.solution.iterations) + " iterations");
  const auto& y = result.solution.y;
  // interior-point iterates may sit a hair below the bounds
  result.areas = y.segment(sub.map.x, sub.map.num_members).cwiseMax(model.lower_bounds());
  if (sub.map.nominal()) {
    result.s = sub.pi_bar;
    return result;
  }
  result.s = y(sub.map.s);
  const Index n = sub.map.num_members;
  RobustCertificate cert;
  cert.W = conic::smat(y.segment(sub.map.w, conic::svec_length(n)));
  cert.z = y(sub.map.z);
  cert.margin = robust_margin({result.s - sub.pi_bar, sub.h}, *sub.uncertainty, sub.reliability, cert.W, cert.z);
  result.certificate = std::move(cert);
  return result;
}

truss::DesignPoint solve_nominal(const truss::TrussModel& model, const conic::SolverSettings& settings) {
  const auto result = solve_subproblem(assemble_nominal(model), model, settings);
  return truss::evaluate_design(model, result.areas);
}

}  // namespace drrbdo::robust
