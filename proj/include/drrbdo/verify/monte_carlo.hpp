#ifndef DRRBDO_VERIFY_MONTE_CARLO_HPP
#define DRRBDO_VERIFY_MONTE_CARLO_HPP

#include <cstdint>
#include <vector>

#include "drrbdo/robust/margin.hpp"
#include "drrbdo/truss/model.hpp"
#include "drrbdo/verify/sampling.hpp"

namespace drrbdo::verify {

struct McConfig {
  std::int64_t outer_samples = 200;
  std::int64_t inner_samples = 20000;
  std::uint64_t seed = 1;
  /// Re-solve the structure per sample instead of using the linearization.
  bool exact = false;
  /// Worker threads for the outer loop; 0 picks the hardware count.
  unsigned threads = 0;

  void validate() const;
};

struct FailureEstimate {
  double probability = 0;  // failures / evaluated
  std::int64_t failures = 0;
  std::int64_t evaluated = 0;
  std::int64_t skipped = 0;  // exact mode: nonphysical perturbed designs
};

/// Fraction of zeta ~ N(mu, sigma) with g + grad . zeta > 0.
FailureEstimate failure_probability(const robust::LinearizedConstraint& con, const VectorXd& mu,
                                    const MatrixXd& sigma, std::int64_t count, Rng& rng);

/// Fraction of zeta ~ N(mu, sigma) with pi(x + zeta) > pi_bar. Samples with a
/// nonpositive area or a singular stiffness matrix are skipped and counted.
FailureEstimate failure_probability_exact(const truss::TrussModel& model, const VectorXd& areas,
                                          const VectorXd& mu, const MatrixXd& sigma, std::int64_t count,
                                          Rng& rng);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::int64_t> counts;
  std::int64_t overflow = 0;  // values above the last edge
};

/// Equal-width bins over [lo, hi].
Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins);

struct DoubleLoopResult {
  std::vector<Moments> moments;
  std::vector<FailureEstimate> estimates;
  double max = 0;
  double mean = 0;
  std::int64_t skipped = 0;
  Histogram histogram;  // 50 bins over [0, 1.2 eps]
};

/// eps + 3 sqrt(eps / inner): binomial slack on a single estimate.
double certification_threshold(double epsilon, std::int64_t inner_samples);

/// Outer loop over sampled moments, inner loop over Gaussian inputs, at the
/// design `areas`. Outer sample i uses Rng::substream(seed, i), so the
/// result does not depend on the thread count.
DoubleLoopResult double_loop(const truss::TrussModel& model, const VectorXd& areas,
                             const robust::MomentUncertainty& unc, const robust::ReliabilitySpec& spec,
                             const McConfig& cfg);

}  // namespace drrbdo::verify

#endif  // DRRBDO_VERIFY_MONTE_CARLO_HPP
