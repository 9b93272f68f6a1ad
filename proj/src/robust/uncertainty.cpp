#include "drrbdo/robust/uncertainty.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include "drrbdo/conic/symmetric.hpp"
#include "drrbdo/errors.hpp"

namespace drrbdo::robust {

std::string to_string(NormKind norm) { return norm == NormKind::kLinf ? "linf" : "l2"; }

NormKind norm_from_string(const std::string& name) {
  if (name == "linf") return NormKind::kLinf;
  if (name == "l2") return NormKind::kL2;
  throw ConfigurationError("unknown norm '" + name + "' (expected linf|l2)");
}

void MomentUncertainty::validate() const {
  const Index n = dimension();
  auto fail = [](const std::string& msg) { throw ConfigurationError("moment uncertainty: " + msg); };
  if (n < 1) fail("empty mean vector");
  if (sigma_tilde.rows() != n || sigma_tilde.cols() != n) fail("sigma_tilde must be n x n");
  if (A.rows() != n || A.cols() < 1) fail("A must have n rows");
  if (B.rows() != n || B.cols() < 1) fail("B must have n rows");
  if (!(alpha >= 0) || !(beta >= 0)) fail("alpha and beta must be nonnegative");
  if (!conic::is_symmetric(sigma_tilde, 1e-10)) fail("sigma_tilde is not symmetric");
  if (!conic::factor_spd(MatrixXd((sigma_tilde + sigma_tilde.transpose()) / 2)))
    fail("sigma_tilde is not positive definite");
}

MomentUncertainty MomentUncertainty::isotropic(VectorXd mu_tilde, MatrixXd sigma_tilde, double alpha, double beta,
                                               NormKind norm) {
  MomentUncertainty u;
  const Index n = mu_tilde.size();
  u.mu_tilde = std::move(mu_tilde);
  u.sigma_tilde = std::move(sigma_tilde);
  u.A = MatrixXd::Identity(n, n);
  u.B = MatrixXd::Identity(n, n);
  u.alpha = alpha;
  u.beta = beta;
  u.norm = norm;
  u.validate();
  return u;
}

double dual_matrix_norm(NormKind norm, const MatrixXd& m) {
  return norm == NormKind::kLinf ? m.cwiseAbs().sum() : m.norm();
}

double dual_vector_norm(NormKind norm, const VectorXd& v) {
  return norm == NormKind::kLinf ? v.lpNorm<1>() : v.norm();
}

namespace {

// Accepts nested rows or a flat row-major array with `rows` rows.
MatrixXd matrix_from_json(const nlohmann::json& j, Index rows, const std::string& name) {
  std::vector<double> flat;
  Index cols = 0;
  if (!j.empty() && j[0].is_array()) {
    if (Index(j.size()) != rows) throw ConfigurationError(name + ": expected " + std::to_string(rows) + " rows");
    cols = Index(j[0].size());
    for (const auto& row : j) {
      if (Index(row.size()) != cols) throw ConfigurationError(name + ": ragged rows");
      for (const auto& v : row) flat.push_back(v.get<double>());
    }
  } else {
    flat = j.get<std::vector<double>>();
    if (rows == 0 || Index(flat.size()) % rows != 0)
      throw ConfigurationError(name + ": length " + std::to_string(flat.size()) + " is not a multiple of " +
                               std::to_string(rows));
    cols = Index(flat.size()) / rows;
  }
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) m(i, c) = flat[std::size_t(i * cols + c)];
  return m;
}

nlohmann::json row_major(const MatrixXd& m) {
  std::vector<double> flat;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index c = 0; c < m.cols(); ++c) flat.push_back(m(i, c));
  return flat;
}

}  // namespace

UncertaintyConfig UncertaintyConfig::from_json(const nlohmann::json& doc) {
  UncertaintyConfig cfg;
  auto& u = cfg.uncertainty;
  try {
    const auto mu = doc.at("mu_tilde").get<std::vector<double>>();
    const Index n = Index(mu.size());
    u.mu_tilde = Eigen::Map<const VectorXd>(mu.data(), n);
    u.sigma_tilde = matrix_from_json(doc.at("sigma_tilde"), n, "sigma_tilde");
    u.A = doc.contains("A") ? matrix_from_json(doc.at("A"), n, "A") : MatrixXd::Identity(n, n);
    u.B = doc.contains("B") ? matrix_from_json(doc.at("B"), n, "B") : MatrixXd::Identity(n, n);
    u.alpha = doc.at("alpha").get<double>();
    u.beta = doc.at("beta").get<double>();
    u.norm = norm_from_string(doc.value("norm", std::string("linf")));
    cfg.reliability.epsilon = doc.value("epsilon", 0.01);
    cfg.reliability.family = family_from_string(doc.value("family", std::string("gaussian")));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("uncertainty json: ") + e.what());
  }
  u.validate();
  if (!(cfg.reliability.epsilon > 0 && cfg.reliability.epsilon < 1))
    throw ConfigurationError("uncertainty json: epsilon must lie in (0, 1)");
  return cfg;
}

UncertaintyConfig UncertaintyConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open uncertainty file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json UncertaintyConfig::to_json() const {
  const auto& u = uncertainty;
  nlohmann::json doc;
  doc["mu_tilde"] = std::vector<double>(u.mu_tilde.data(), u.mu_tilde.data() + u.mu_tilde.size());
  doc["sigma_tilde"] = row_major(u.sigma_tilde);
  doc["A"] = row_major(u.A);
  doc["B"] = row_major(u.B);
  doc["alpha"] = u.alpha;
  doc["beta"] = u.beta;
  doc["norm"] = to_string(u.norm);
  doc["epsilon"] = reliability.epsilon;
  doc["family"] = to_string(reliability.family);
  return doc;
}

}  // namespace drrbdo::robust
