#ifndef DRRBDO_VERIFY_ORACLES_HPP
#define DRRBDO_VERIFY_ORACLES_HPP

#include <cstdint>
#include <vector>

#include "drrbdo/conic/cone.hpp"
#include "drrbdo/robust/uncertainty.hpp"
#include "drrbdo/verify/sampling.hpp"

namespace drrbdo::verify {

struct WorstVarianceResult {
  double closed_form = 0;  // kappa sqrt(g^T Sigma g)
  double sdp_value = 0;    // min Sigma . L + kappa^2 z over [[L, g/2], [g^T/2, z]] psd
  double gap() const;      // |sdp - closed| / (1 + closed)
  bool agrees() const { return gap() <= 1e-6; }
};

/// Throws SolverError when the conic solve is not optimal.
WorstVarianceResult worst_variance_oracle(double kappa, const MatrixXd& sigma, const VectorXd& g,
                               const conic::SolverSettings& settings = {});

struct VarianceDualityResult {
  double sampled_max = 0;  // max of Lambda . Sigma over sampled Sigma in U_Sigma
  double dual_min = 0;     // min over Omega psd of Sigma~ . (L + O) + beta ||B^T (L + O) B||
  double gap = 0;          // (dual_min - sampled_max) / |dual_min|
  std::int64_t samples = 0;
  bool sandwich() const { return sampled_max <= dual_min + 1e-8; }
};

/// mu-part of `unc` is ignored. Throws SolverError when the conic solve
/// is not optimal.
VarianceDualityResult variance_duality_oracle(const MatrixXd& lambda, const robust::MomentUncertainty& unc,
                                              std::int64_t sample_count, Rng& rng,
                                              const conic::SolverSettings& settings = {});

/// One instance of the randomized batteries below.
struct WorstVarianceInstance {
  double kappa;
  MatrixXd sigma;
  VectorXd g;
  WorstVarianceResult result;
};

/// `count` instances with kappa in [0.1, 5], Sigma positive definite of
/// side 1..5 and standard normal g.
std::vector<WorstVarianceInstance> worst_variance_battery(int count, std::uint64_t seed);

struct VarianceInstance {
  robust::MomentUncertainty uncertainty;
  MatrixXd lambda;
  VarianceDualityResult result;
};

/// Randomized instances of side 2 and 3 over both norms, plus the diagonal
/// case Lambda = I, and beta = 0 cases.
std::vector<VarianceInstance> variance_battery(int count, std::int64_t samples, std::uint64_t seed);

}  // namespace drrbdo::verify

#endif  // DRRBDO_VERIFY_ORACLES_HPP
