#include "drrbdo/robust/margin.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "drrbdo/conic/solver.hpp"
#include "drrbdo/conic/symmetric.hpp"
#include "drrbdo/errors.hpp"

namespace drrbdo::robust {

double deterministic_margin(const LinearizedConstraint& con, const VectorXd& mu, const MatrixXd& sigma,
                            double kappa) {
  const Index n = con.gradient.size();
  if (mu.size() != n || sigma.rows() != n || sigma.cols() != n)
    throw StructuralError("deterministic_margin: moment sizes do not match the gradient");
  conic::require_symmetric(sigma, "deterministic_margin");
  const double variance = con.gradient.dot(sigma * con.gradient);
  return con.value + con.gradient.dot(mu) + kappa * std::sqrt(std::max(0.0, variance));
}

double worst_mean_term(const LinearizedConstraint& con, const MomentUncertainty& unc) {
  if (con.gradient.size() != unc.dimension()) throw StructuralError("worst_mean_term: gradient has wrong length");
  return con.gradient.dot(unc.mu_tilde) +
         unc.alpha * dual_vector_norm(unc.norm, unc.A.transpose() * con.gradient);
}

MarginBreakdown robust_margin(const LinearizedConstraint& con, const MomentUncertainty& unc,
                              const ReliabilitySpec& spec, const MatrixXd& W, double z) {
  const double k = kappa(spec);
  MarginBreakdown m;
  m.deterministic = con.value;
  m.worst_mean = worst_mean_term(con, unc);
  m.sigma_dot_w = conic::frobenius_dot(unc.sigma_tilde, W);
  m.norm_penalty = unc.beta * dual_matrix_norm(unc.norm, unc.B.transpose() * W * unc.B);
  m.kappa_sq_z = k * k * z;
  return m;
}

conic::Affine add_norm_epigraph(conic::ProgramBuilder& builder, NormKind norm, const MatrixXd& B,
                                const MatrixXd& constant, Index w) {
  const Index n = B.rows();
  const Index k = B.cols();
  const Index len = conic::svec_length(n);
  // B^T smat(e_j) B for every svec coordinate j of W
  std::vector<MatrixXd> images(static_cast<std::size_t>(len));
  for (Index j = 0; j < len; ++j)
    images[std::size_t(j)] = B.transpose() * conic::smat(VectorXd::Unit(len, j)) * B;
  const MatrixXd base = B.transpose() * constant * B;

  auto entry = [&](Index a, Index b) {
    conic::Affine e;
    e.constant = base(a, b);
    for (Index j = 0; j < len; ++j) e.add(w + j, images[std::size_t(j)](a, b));
    return e;
  };

  conic::Affine bound;
  const Index t = builder.add_variables(norm == NormKind::kLinf ? conic::svec_length(k) : 1);
  if (norm == NormKind::kLinf) {
    for (Index b = 0; b < k; ++b) {
      for (Index a = b; a < k; ++a) {
        const Index var = t + conic::svec_index(k, a, b);
        const conic::Affine e = entry(a, b);
        conic::Affine upper = e.scaled(-1);
        upper.add(var, 1);
        conic::Affine lower = e;
        lower.add(var, 1);
        builder.add_nonneg(upper);
        builder.add_nonneg(lower);
        bound.add(var, a == b ? 1 : 2);
      }
    }
  } else {
    std::vector<conic::Affine> rows;
    rows.push_back(conic::Affine{}.add(t, 1));
    const double root2 = std::sqrt(2.0);
    for (Index b = 0; b < k; ++b)
      for (Index a = b; a < k; ++a) rows.push_back(a == b ? entry(a, b) : entry(a, b).scaled(root2));
    builder.add_soc(std::move(rows));
    bound.add(t, 1);
  }
  return bound;
}

VarianceTerm add_variance_term(conic::ProgramBuilder& builder, const VectorXd& gradient,
                               const MomentUncertainty& unc, double kappa) {
  const Index n = unc.dimension();
  if (gradient.size() != n) throw StructuralError("variance term: gradient has wrong length");
  const Index len = conic::svec_length(n);
  VarianceTerm term;
  term.w = builder.add_variables(len);
  term.z = builder.add_variables(1);

  const double root2 = std::sqrt(2.0);
  std::vector<conic::Affine> rows(std::size_t(conic::svec_length(n + 1)));
  for (Index b = 0; b <= n; ++b) {
    for (Index a = b; a <= n; ++a) {
      conic::Affine& row = rows[std::size_t(conic::svec_index(n + 1, a, b))];
      if (a < n)
        row.add(term.w + conic::svec_index(n, a, b), 1);
      else if (b < n)
        row.constant = root2 * gradient(b) / 2;
      else
        row.add(term.z, 1);
    }
  }
  builder.add_psd(n + 1, std::move(rows));

  const VectorXd sigma = conic::svec(unc.sigma_tilde);
  for (Index j = 0; j < len; ++j) term.cost.add(term.w + j, sigma(j));
  if (unc.beta > 0)
    term.cost += add_norm_epigraph(builder, unc.norm, unc.B, MatrixXd::Zero(n, n), term.w).scaled(unc.beta);
  term.cost.add(term.z, kappa * kappa);
  return term;
}

RobustCertificate worst_case_certificate(const LinearizedConstraint& con, const MomentUncertainty& unc,
                                         const ReliabilitySpec& spec, const conic::SolverSettings& settings) {
  conic::ProgramBuilder builder;
  const VarianceTerm term = add_variance_term(builder, con.gradient, unc, kappa(spec));
  builder.add_objective(term.cost);
  const auto solution = conic::solve(builder.build(), settings);
  if (!solution.optimal())
    throw SolverError("worst-case certificate: conic solve ended with status " + to_string(solution.status));
  RobustCertificate cert;
  cert.W = conic::smat(solution.y.segment(term.w, conic::svec_length(unc.dimension())));
  cert.z = solution.y(term.z);
  cert.margin = robust_margin(con, unc, spec, cert.W, cert.z);
  return cert;
}

}  // namespace drrbdo::robust
