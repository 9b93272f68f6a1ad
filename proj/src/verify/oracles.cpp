#include "drrbdo/verify/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "drrbdo/conic/builder.hpp"
#include "drrbdo/conic/solver.hpp"
#include "drrbdo/conic/symmetric.hpp"
#include "drrbdo/errors.hpp"
#include "drrbdo/robust/margin.hpp"

namespace drrbdo::verify {

namespace {

conic::ConeSolution<double> solve_or_throw(const conic::ProgramBuilder& builder, const conic::SolverSettings& settings,
                                           const char* what) {
  auto sol = conic::solve(builder.build(), settings);
  if (!sol.optimal())
    throw SolverError(std::string(what) + ": conic solve ended with status " + conic::to_string(sol.status));
  return sol;
}

MatrixXd random_spd(Index n, Rng& rng, double shift) {
  MatrixXd a(n, n);
  for (auto& e : a.reshaped()) e = rng.normal();
  return a * a.transpose() / double(n) + shift * MatrixXd::Identity(n, n);
}

MatrixXd random_symmetric(Index n, Rng& rng) {
  MatrixXd a(n, n);
  for (auto& e : a.reshaped()) e = rng.normal();
  return (a + a.transpose()) / 2;
}

}  // namespace

double WorstVarianceResult::gap() const { return std::abs(sdp_value - closed_form) / (1 + closed_form); }

WorstVarianceResult worst_variance_oracle(double kappa, const MatrixXd& sigma, const VectorXd& g,
                               const conic::SolverSettings& settings) {
  if (!(kappa > 0)) throw DomainError("worst_variance_oracle: kappa must be positive");
  const Index n = g.size();
  if (sigma.rows() != n || sigma.cols() != n) throw StructuralError("worst_variance_oracle: sigma has wrong size");
  conic::require_symmetric(sigma, "worst_variance_oracle");
  robust::MomentUncertainty unc;
  unc.mu_tilde = VectorXd::Zero(n);
  unc.sigma_tilde = sigma;
  unc.A = unc.B = MatrixXd::Identity(n, n);

  conic::ProgramBuilder builder;
  const auto term = robust::add_variance_term(builder, g, unc, kappa);
  builder.add_objective(term.cost);
  const auto sol = solve_or_throw(builder, settings, "worst_variance_oracle");
  WorstVarianceResult r;
  r.closed_form = kappa * std::sqrt(std::max(0.0, g.dot(sigma * g)));
  r.sdp_value = sol.primal_objective;
  return r;
}

VarianceDualityResult variance_duality_oracle(const MatrixXd& lambda, const robust::MomentUncertainty& unc,
                                              std::int64_t sample_count, Rng& rng,
                                              const conic::SolverSettings& settings) {
  const Index n = unc.dimension();
  if (lambda.rows() != n || lambda.cols() != n) throw StructuralError("variance_duality_oracle: Lambda has wrong size");
  conic::require_symmetric(lambda, "variance_duality_oracle");

  VarianceDualityResult r;
  MomentSampler sampler(unc);
  r.sampled_max = -INFINITY;
  for (std::int64_t i = 0; i < sample_count; ++i)
    r.sampled_max = std::max(r.sampled_max, conic::frobenius_dot(lambda, sampler.sample(rng).sigma));
  r.samples = sample_count;

  const Index len = conic::svec_length(n);
  conic::ProgramBuilder builder;
  const Index omega = builder.add_variables(len);
  std::vector<conic::Affine> rows(static_cast<std::size_t>(len));
  for (Index j = 0; j < len; ++j) rows[std::size_t(j)].add(omega + j, 1);
  builder.add_psd(n, std::move(rows));
  const VectorXd sigma = conic::svec(unc.sigma_tilde);
  for (Index j = 0; j < len; ++j) builder.add_objective(omega + j, sigma(j));
  if (unc.beta > 0)
    builder.add_objective(robust::add_norm_epigraph(builder, unc.norm, unc.B, lambda, omega).scaled(unc.beta));
  const auto sol = solve_or_throw(builder, settings, "variance_duality_oracle");
  // primal value: an upper bound on the minimum up to solver tolerance
  r.dual_min = sol.primal_objective + conic::frobenius_dot(unc.sigma_tilde, lambda);
  r.gap = (r.dual_min - r.sampled_max) / std::max(std::abs(r.dual_min), 1e-300);
  return r;
}

std::vector<WorstVarianceInstance> worst_variance_battery(int count, std::uint64_t seed) {
  std::vector<WorstVarianceInstance> out;
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::substream(seed, std::uint64_t(i));
    const Index n = 1 + Index(i % 5);
    WorstVarianceInstance inst;
    inst.kappa = rng.uniform(0.1, 5);
    inst.sigma = random_spd(n, rng, 0.05);
    inst.g.resize(n);
    for (auto& e : inst.g) e = rng.normal();
    inst.result = worst_variance_oracle(inst.kappa, inst.sigma, inst.g);
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<VarianceInstance> variance_battery(int count, std::int64_t samples, std::uint64_t seed) {
  std::vector<VarianceInstance> out;
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::substream(seed, std::uint64_t(i));
    const Index n = 2 + Index(i % 2);
    const auto norm = (i / 2) % 2 ? robust::NormKind::kL2 : robust::NormKind::kLinf;
    double beta = rng.uniform(0.05, 0.3);
    if (i % 7 == 6) beta = 0;
    VarianceInstance inst;
    inst.uncertainty = robust::MomentUncertainty::isotropic(VectorXd::Zero(n), random_spd(n, rng, 0.5), 0, beta, norm);
    inst.lambda = i % 5 == 4 ? MatrixXd(MatrixXd::Identity(n, n)) : random_symmetric(n, rng);
    inst.result = variance_duality_oracle(inst.lambda, inst.uncertainty, samples, rng);
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace drrbdo::verify
