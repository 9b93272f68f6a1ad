#ifndef DRRBDO_ROBUST_RELIABILITY_HPP
#define DRRBDO_ROBUST_RELIABILITY_HPP

#include <string>

namespace drrbdo::robust {

/// Which input distributions the reliability constraint must hold for.
enum class DistributionFamily { kGaussian, kAll };

std::string to_string(DistributionFamily family);
DistributionFamily family_from_string(const std::string& name);

/// Standard normal distribution function, via erfc.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0, 1); throws DomainError outside.
double normal_quantile(double p);

struct ReliabilitySpec {
  double epsilon = 0.01;
  DistributionFamily family = DistributionFamily::kGaussian;
};

/// Safety factor: -Phi^-1(eps) for Gaussian inputs, sqrt((1 - eps)/eps)
/// when every distribution with the given moments is admitted.
double kappa(const ReliabilitySpec& spec);

/// kappa(spec) after checking eps < 0.5, which the reformulation needs
/// (kappa > 0). Throws DomainError otherwise.
double robust_kappa(const ReliabilitySpec& spec);

}  // namespace drrbdo::robust

#endif  // DRRBDO_ROBUST_RELIABILITY_HPP
