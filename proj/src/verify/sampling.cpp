#include "drrbdo/verify/sampling.hpp"

#include <cmath>
#include <sstream>

#include "drrbdo/conic/symmetric.hpp"
#include "drrbdo/errors.hpp"

namespace drrbdo::verify {

VectorXd sample_ball(robust::NormKind norm, Index dim, double radius, Rng& rng) {
  VectorXd v(dim);
  if (norm == robust::NormKind::kLinf) {
    for (auto& e : v) e = rng.uniform(-radius, radius);
    return v;
  }
  double length = 0;
  do {
    for (auto& e : v) e = rng.normal();
    length = v.norm();
  } while (length == 0);
  return v * (radius * std::pow(rng.uniform(), 1.0 / double(dim)) / length);
}

bool admissible_covariance(const MatrixXd& sigma) { return conic::factor_spd(sigma).has_value(); }

MomentSampler::MomentSampler(const robust::MomentUncertainty& unc) : unc_(unc) { unc_.validate(); }

MatrixXd MomentSampler::sample_perturbation(Rng& rng) const {
  const Index k = unc_.B.cols();
  if (unc_.norm == robust::NormKind::kL2)
    return conic::smat(sample_ball(robust::NormKind::kL2, conic::svec_length(k), unc_.beta, rng));
  MatrixXd z(k, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = j; i < k; ++i) z(i, j) = z(j, i) = rng.uniform(-unc_.beta, unc_.beta);
  return z;
}

Moments MomentSampler::sample(Rng& rng) {
  Moments m;
  m.mu = unc_.mu_tilde + unc_.A * sample_ball(unc_.norm, unc_.A.cols(), unc_.alpha, rng);
  for (;;) {
    ++attempts_;
    m.sigma = unc_.sigma_tilde + unc_.B * sample_perturbation(rng) * unc_.B.transpose();
    m.sigma = (m.sigma + m.sigma.transpose()) / 2;
    if (admissible_covariance(m.sigma)) {
      ++accepted_;
      return m;
    }
    if (attempts_ >= kRejectionWindow && double(accepted_) < 1e-3 * double(attempts_)) {
      std::ostringstream msg;
      msg << "covariance sampler rejected " << attempts_ - accepted_ << " of " << attempts_
          << " draws as not positive definite; sigma_tilde = [" << unc_.sigma_tilde.reshaped().transpose()
          << "] is too close to singular for beta = " << unc_.beta;
      throw ConfigurationError(msg.str());
    }
  }
}

Moments sample_moments(const robust::MomentUncertainty& unc, Rng& rng) { return MomentSampler(unc).sample(rng); }

MatrixXd sample_gaussian(const VectorXd& mu, const MatrixXd& sigma, Index count, Rng& rng) {
  if (sigma.rows() != mu.size()) throw StructuralError("sample_gaussian: sigma and mu sizes differ");
  const auto l = conic::factor_spd(sigma);
  if (!l) throw StructuralError("sample_gaussian: covariance is not positive definite");
  MatrixXd w(mu.size(), count);
  for (auto& e : w.reshaped()) e = rng.normal();
  MatrixXd out = l->triangularView<Eigen::Lower>() * w;
  out.colwise() += mu;
  return out;
}

}  // namespace drrbdo::verify
