#ifndef DRRBDO_CONIC_CONE_HPP
#define DRRBDO_CONIC_CONE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "drrbdo/conic/symmetric.hpp"

namespace drrbdo::conic {

enum class ConeKind { kNonneg, kSoc, kPsd };

std::string to_string(ConeKind kind);
ConeKind cone_kind_from_string(const std::string& name);

/// One cone block. `dim` is the component count (nonneg), the cone order
/// (soc: t >= ||u|| with u of length dim - 1) or the matrix side (psd).
struct ConeBlock {
  ConeKind kind;
  Eigen::Index dim;

  /// Number of slack coordinates this block occupies.
  Eigen::Index slack_length() const { return kind == ConeKind::kPsd ? svec_length(dim) : dim; }
  /// Jordan-algebra rank: contribution to the barrier degree.
  Eigen::Index degree() const {
    switch (kind) {
      case ConeKind::kNonneg: return dim;
      case ConeKind::kSoc: return 1;
      case ConeKind::kPsd: return dim;
    }
    return 0;
  }

  friend bool operator==(const ConeBlock&, const ConeBlock&) = default;
};

/// Ordered product of cone blocks partitioning the slack vector.
class ConeSpec {
 public:
  ConeSpec() = default;
  explicit ConeSpec(std::vector<ConeBlock> blocks);

  ConeSpec& nonneg(Eigen::Index dim) { return add({ConeKind::kNonneg, dim}); }
  ConeSpec& soc(Eigen::Index dim) { return add({ConeKind::kSoc, dim}); }
  ConeSpec& psd(Eigen::Index side) { return add({ConeKind::kPsd, side}); }
  ConeSpec& add(ConeBlock block);

  const std::vector<ConeBlock>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  const ConeBlock& operator[](std::size_t i) const { return blocks_[i]; }

  Eigen::Index slack_length() const;
  Eigen::Index degree() const;
  /// Offset of block i within the slack vector.
  Eigen::Index offset(std::size_t i) const;

  friend bool operator==(const ConeSpec&, const ConeSpec&) = default;

 private:
  std::vector<ConeBlock> blocks_;
};

/// minimize objective^T y  subject to  h - G y in cones.
template <typename Scalar>
struct ConeProgram {
  Vector<Scalar> objective;
  Matrix<Scalar> G;
  Vector<Scalar> h;
  ConeSpec cones;

  Eigen::Index num_variables() const { return objective.size(); }
  /// Throws StructuralError when dimensions disagree.
  void validate() const {
    for (const auto& b : cones.blocks())
      if (b.dim < 1) throw StructuralError("cone block with dimension < 1");
    if (G.rows() != cones.slack_length())
      throw StructuralError("G has " + std::to_string(G.rows()) + " rows, cones need " +
                            std::to_string(cones.slack_length()));
    if (h.size() != G.rows())
      throw StructuralError("h length " + std::to_string(h.size()) + " != G rows " +
                            std::to_string(G.rows()));
    if (objective.size() != G.cols())
      throw StructuralError("objective length " + std::to_string(objective.size()) +
                            " != G columns " + std::to_string(G.cols()));
  }
};

enum class SolveStatus { kOptimal, kPrimalInfeasible, kDualInfeasible, kMaxIterations };

std::string to_string(SolveStatus status);

struct SolverSettings {
  double tolerance = 1e-8;
  int max_iterations = 200;
  double step_fraction = 0.99;
  /// Residual growth ratio that triggers an infeasibility report.
  double divergence_ratio = 1e8;
};

template <typename Scalar>
struct IterateRecord {
  int iteration;
  Scalar primal_objective;
  Scalar dual_objective;
  Scalar primal_residual;
  Scalar dual_residual;
  Scalar gap_residual;
  Scalar step;
};

template <typename Scalar>
struct ConeSolution {
  SolveStatus status = SolveStatus::kMaxIterations;
  Vector<Scalar> y;
  /// Slack h - G y, partitioned like the cone spec.
  Vector<Scalar> slack;
  /// Dual multipliers, one entry per cone block (svec form for psd).
  std::vector<Vector<Scalar>> duals;
  Scalar primal_objective = 0;
  Scalar dual_objective = 0;
  Scalar primal_residual = 0;
  Scalar dual_residual = 0;
  Scalar gap_residual = 0;
  int iterations = 0;
  std::string diagnostics;
  std::vector<IterateRecord<Scalar>> log;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

/// Membership test used for primal slacks and dual multipliers alike
/// (all cones here are self-dual).
template <typename Scalar>
bool in_cone(const ConeBlock& block, const Eigen::Ref<const Vector<Scalar>>& v, Scalar tol) {
  switch (block.kind) {
    case ConeKind::kNonneg:
      return v.size() == 0 || v.minCoeff() >= -tol;
    case ConeKind::kSoc:
      return v(0) >= v.tail(v.size() - 1).norm() - tol;
    case ConeKind::kPsd: {
      const Matrix<Scalar> m = smat(v);
      return min_eigenvalue(m) >= -tol * m.norm();
    }
  }
  return false;
}

}  // namespace drrbdo::conic

#endif  // DRRBDO_CONIC_CONE_HPP
