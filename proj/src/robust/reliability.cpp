#include "drrbdo/robust/reliability.hpp"

#include <cmath>
#include <numbers>

#include "drrbdo/errors.hpp"

namespace drrbdo::robust {

std::string to_string(DistributionFamily family) {
  return family == DistributionFamily::kGaussian ? "gaussian" : "all";
}

DistributionFamily family_from_string(const std::string& name) {
  if (name == "gaussian") return DistributionFamily::kGaussian;
  if (name == "all") return DistributionFamily::kAll;
  throw ConfigurationError("unknown distribution family '" + name + "' (expected gaussian|all)");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) throw DomainError("normal_quantile: probability must lie in (0, 1)");
  // Rational starting point (Acklam), then Halley steps on erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - low) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  for (int it = 0; it < 3; ++it) {
    // Phi(x) - p, evaluated in whichever tail keeps precision
    const double e = (x < 0) ? normal_cdf(x) - p : (1 - p) - normal_cdf(-x);
    const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    x -= u / (1 + x * u / 2);
  }
  return x;
}

double kappa(const ReliabilitySpec& spec) {
  const double eps = spec.epsilon;
  if (spec.family == DistributionFamily::kGaussian) {
    if (!(eps > 0 && eps < 1)) throw DomainError("kappa: epsilon must lie in (0, 1) for gaussian inputs");
    return eps == 0.5 ? 0.0 : -normal_quantile(eps);
  }
  if (!(eps > 0 && eps <= 1)) throw DomainError("kappa: epsilon must lie in (0, 1]");
  return std::sqrt((1 - eps) / eps);
}

double robust_kappa(const ReliabilitySpec& spec) {
  if (!(spec.epsilon < 0.5))
    throw DomainError("robust reformulation needs epsilon < 0.5 so that kappa > 0 (got " +
                      std::to_string(spec.epsilon) + ")");
  return kappa(spec);
}

}  // namespace drrbdo::robust
