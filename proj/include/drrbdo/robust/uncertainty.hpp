#ifndef DRRBDO_ROBUST_UNCERTAINTY_HPP
#define DRRBDO_ROBUST_UNCERTAINTY_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <json.hpp>
#include <string>

#include "drrbdo/robust/reliability.hpp"

namespace drrbdo::robust {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class NormKind { kLinf, kL2 };

std::string to_string(NormKind norm);
NormKind norm_from_string(const std::string& name);

/// Moment uncertainty sets
///   U_mu    = { mu~ + A z1 : ||z1|| <= alpha }
///   U_Sigma = { Sigma~ + B Z2 B^T : ||Z2|| <= beta } intersected with PSD,
/// where the norm is the entrywise max (linf) or Euclidean/Frobenius (l2).
struct MomentUncertainty {
  VectorXd mu_tilde;
  MatrixXd sigma_tilde;
  MatrixXd A;  // n x m
  MatrixXd B;  // n x k
  double alpha = 0;
  double beta = 0;
  NormKind norm = NormKind::kLinf;

  Index dimension() const { return mu_tilde.size(); }
  /// Throws ConfigurationError on inconsistent sizes, negative magnitudes or
  /// a Sigma~ that is not positive definite.
  void validate() const;

  /// A = B = I.
  static MomentUncertainty isotropic(VectorXd mu_tilde, MatrixXd sigma_tilde, double alpha, double beta,
                                     NormKind norm);
};

/// Norm used on B^T W B in the worst-case variance term: sum |.| (linf
/// model, the dual of the entrywise max) or Frobenius (l2 model).
double dual_matrix_norm(NormKind norm, const MatrixXd& m);
/// Dual vector norm: l1 for the linf model, l2 for the l2 model.
double dual_vector_norm(NormKind norm, const VectorXd& v);

/// Contents of an uncertainty file: the sets plus the reliability target.
struct UncertaintyConfig {
  MomentUncertainty uncertainty;
  ReliabilitySpec reliability;

  static UncertaintyConfig from_json(const nlohmann::json& doc);
  static UncertaintyConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

}  // namespace drrbdo::robust

#endif  // DRRBDO_ROBUST_UNCERTAINTY_HPP
