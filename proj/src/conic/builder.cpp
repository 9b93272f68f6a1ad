#include "drrbdo/conic/builder.hpp"

#include <string>

#include "drrbdo/conic/symmetric.hpp"

namespace drrbdo::conic {

Eigen::Index ProgramBuilder::add_variables(Eigen::Index count) {
  const Eigen::Index first = num_variables_;
  num_variables_ += count;
  return first;
}

void ProgramBuilder::add_objective(Eigen::Index var, double coef) { objective_.push_back({var, coef}); }

void ProgramBuilder::add_objective(const Affine& expr) {
  objective_.insert(objective_.end(), expr.terms.begin(), expr.terms.end());
}

void ProgramBuilder::add_nonneg(const Affine& expr) { nonneg_rows_.push_back(expr); }

void ProgramBuilder::add_soc(std::vector<Affine> rows) {
  if (rows.empty()) throw StructuralError("second-order cone needs at least one row");
  blocks_.push_back({{ConeKind::kSoc, Eigen::Index(rows.size())}, std::move(rows)});
}

void ProgramBuilder::add_psd(Eigen::Index side, std::vector<Affine> svec_rows) {
  if (Eigen::Index(svec_rows.size()) != svec_length(side))
    throw StructuralError("psd block of side " + std::to_string(side) + " needs " +
                          std::to_string(svec_length(side)) + " rows");
  blocks_.push_back({{ConeKind::kPsd, side}, std::move(svec_rows)});
}

void ProgramBuilder::add_psd(const Eigen::MatrixXd& constant,
                             const std::vector<std::pair<Eigen::Index, Eigen::MatrixXd>>& terms) {
  const Eigen::Index side = constant.rows();
  const Eigen::VectorXd c = svec(constant);
  std::vector<Affine> rows(std::size_t(c.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) rows[std::size_t(i)].constant = c(i);
  for (const auto& [var, m] : terms) {
    if (m.rows() != side || m.cols() != side) throw StructuralError("psd term has wrong size");
    const Eigen::VectorXd v = svec(m);
    for (Eigen::Index i = 0; i < v.size(); ++i) rows[std::size_t(i)].add(var, v(i));
  }
  add_psd(side, std::move(rows));
}

ConeProgram<double> ProgramBuilder::build() const {
  ConeProgram<double> p;
  std::vector<const Affine*> rows;
  if (!nonneg_rows_.empty()) {
    p.cones.nonneg(Eigen::Index(nonneg_rows_.size()));
    for (const auto& r : nonneg_rows_) rows.push_back(&r);
  }
  for (const auto& b : blocks_) {
    p.cones.add(b.cone);
    for (const auto& r : b.rows) rows.push_back(&r);
  }
  const Eigen::Index m = Eigen::Index(rows.size());
  p.G = Eigen::MatrixXd::Zero(m, num_variables_);
  p.h.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    p.h(i) = rows[std::size_t(i)]->constant;
    for (const auto& t : rows[std::size_t(i)]->terms) {
      if (t.var < 0 || t.var >= num_variables_) throw StructuralError("affine term references unknown variable");
      p.G(i, t.var) -= t.coef;
    }
  }
  p.objective = Eigen::VectorXd::Zero(num_variables_);
  for (const auto& t : objective_) p.objective(t.var) += t.coef;
  p.validate();
  return p;
}

}  // namespace drrbdo::conic
