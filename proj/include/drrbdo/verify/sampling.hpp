#ifndef DRRBDO_VERIFY_SAMPLING_HPP
#define DRRBDO_VERIFY_SAMPLING_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "drrbdo/robust/uncertainty.hpp"
#include "drrbdo/verify/random.hpp"

namespace drrbdo::verify {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Moments {
  VectorXd mu;
  MatrixXd sigma;
};

/// Uniform draw from the ball of radius `radius` in the max norm (linf) or
/// the Euclidean norm (l2).
VectorXd sample_ball(robust::NormKind norm, Index dim, double radius, Rng& rng);

/// True when sigma is accepted as a covariance: it must factor with a
/// positive pivot margin, since the inner Gaussian sampler needs strict PD.
bool admissible_covariance(const MatrixXd& sigma);

/// Draws (mu, Sigma) uniformly from the uncertainty sets, rejecting Sigma
/// that are not positive definite.
class MomentSampler {
 public:
  static constexpr std::int64_t kRejectionWindow = 100000;

  explicit MomentSampler(const robust::MomentUncertainty& unc);

  /// Throws ConfigurationError once the rejection rate over at least
  /// kRejectionWindow attempts exceeds 99.9%.
  Moments sample(Rng& rng);
  /// Perturbation Z2 (before the PSD test), exposed for tests.
  MatrixXd sample_perturbation(Rng& rng) const;

  std::int64_t attempts() const { return attempts_; }
  std::int64_t accepted() const { return accepted_; }

 private:
  robust::MomentUncertainty unc_;
  std::int64_t attempts_ = 0;
  std::int64_t accepted_ = 0;
};

Moments sample_moments(const robust::MomentUncertainty& unc, Rng& rng);

/// `count` columns of mu + L w with L the Cholesky factor of sigma.
/// Throws StructuralError when sigma is not positive definite.
MatrixXd sample_gaussian(const VectorXd& mu, const MatrixXd& sigma, Index count, Rng& rng);

}  // namespace drrbdo::verify

#endif  // DRRBDO_VERIFY_SAMPLING_HPP
