#include "drrbdo/robust/sequential.hpp"

#include "drrbdo/errors.hpp"

namespace drrbdo::robust {

std::string to_string(SequentialStatus status) {
  return status == SequentialStatus::kConverged ? "converged" : "not-converged";
}

SequentialResult sequential_sdp(const truss::TrussModel& model, const MomentUncertainty& unc,
                                const ReliabilitySpec& spec, const SequentialSettings& settings) {
  robust_kappa(spec);
  unc.validate();
  SequentialResult out;
  out.nominal = solve_nominal(model, settings.solver);
  truss::DesignPoint current = out.nominal;

  for (int k = 1; k <= settings.max_iterations; ++k) {
    const Subproblem sub = assemble_subproblem(model, current.gradient, unc, spec);
    SubproblemResult step;
    try {
      step = solve_subproblem(sub, model, settings.solver);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (outer iteration " + std::to_string(k) + ")");
    }
    truss::DesignPoint next = truss::evaluate_design(model, step.areas);

    OuterIterate it;
    it.iteration = k;
    it.areas = next.areas;
    it.volume = next.volume;
    it.compliance = next.compliance;
    it.epigraph = step.s;
    it.relative_change = (next.areas - current.areas).lpNorm<Eigen::Infinity>() /
                         current.areas.lpNorm<Eigen::Infinity>();
    auto margin = step.certificate->margin;
    margin.deterministic = next.compliance - model.compliance_bound();
    it.margin = margin.total();
    it.solver_iterations = step.solution.iterations;
    out.log.push_back(it);

    current = std::move(next);
    if (it.relative_change <= settings.tolerance) {
      out.status = SequentialStatus::kConverged;
      break;
    }
  }

  const LinearizedConstraint con{current.compliance - model.compliance_bound(), current.gradient};
  out.certificate = worst_case_certificate(con, unc, spec, settings.solver);
  current.margin = out.certificate.margin;
  out.design = std::move(current);
  return out;
}

}  // namespace drrbdo::robust
