#ifndef DRRBDO_CONIC_BUILDER_HPP
#define DRRBDO_CONIC_BUILDER_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "drrbdo/conic/cone.hpp"

namespace drrbdo::conic {

/// Affine function constant + sum coef * y[var] of the decision vector.
struct Affine {
  struct Term {
    Eigen::Index var;
    double coef;
  };
  double constant = 0;
  std::vector<Term> terms;

  Affine& add(Eigen::Index var, double coef) {
    if (coef != 0) terms.push_back({var, coef});
    return *this;
  }
  Affine& operator+=(const Affine& other) {
    constant += other.constant;
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
    return *this;
  }
  Affine scaled(double factor) const {
    Affine out{constant * factor, terms};
    for (auto& t : out.terms) t.coef *= factor;
    return out;
  }
};

/// Incremental assembly of a ConeProgram from affine cone constraints.
/// Nonnegative rows are merged into one leading nonneg block; other blocks
/// keep insertion order.
class ProgramBuilder {
 public:
  /// Returns the index of the first new variable.
  Eigen::Index add_variables(Eigen::Index count);
  Eigen::Index num_variables() const { return num_variables_; }

  void add_objective(Eigen::Index var, double coef);
  void add_objective(const Affine& expr);

  /// expr >= 0
  void add_nonneg(const Affine& expr);
  /// rows[0] >= || rows[1..] ||
  void add_soc(std::vector<Affine> rows);
  /// smat(rows) psd; rows in svec order.
  void add_psd(Eigen::Index side, std::vector<Affine> svec_rows);
  /// constant + sum_k y[var_k] * M_k psd, all matrices symmetric.
  void add_psd(const Eigen::MatrixXd& constant,
               const std::vector<std::pair<Eigen::Index, Eigen::MatrixXd>>& terms);

  ConeProgram<double> build() const;

 private:
  struct Block {
    ConeBlock cone;
    std::vector<Affine> rows;
  };
  Eigen::Index num_variables_ = 0;
  std::vector<Affine::Term> objective_;
  std::vector<Affine> nonneg_rows_;
  std::vector<Block> blocks_;
};

}  // namespace drrbdo::conic

#endif  // DRRBDO_CONIC_BUILDER_HPP
