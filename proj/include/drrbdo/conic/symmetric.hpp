#ifndef DRRBDO_CONIC_SYMMETRIC_HPP
#define DRRBDO_CONIC_SYMMETRIC_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>

#include "drrbdo/errors.hpp"

namespace drrbdo::conic {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Length of the symmetric vectorization of a d x d matrix.
constexpr Eigen::Index svec_length(Eigen::Index side) { return side * (side + 1) / 2; }

/// Position of entry (i, j), i >= j, of a side-d matrix in its svec.
constexpr Eigen::Index svec_index(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  return j * d - j * (j - 1) / 2 + (i - j);
}

/// Inverse of svec_length; returns -1 when `length` is not triangular.
inline Eigen::Index side_from_svec_length(Eigen::Index length) {
  if (length < 0) return -1;
  auto side = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * double(length) + 1.0) - 1.0) / 2.0));
  return svec_length(side) == length ? side : -1;
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m,
                  typename Derived::RealScalar rel_tol = typename Derived::RealScalar(1e-12)) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const auto scale = m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols())
    throw StructuralError(std::string(what) + ": matrix is not square");
  if (!is_symmetric(m)) throw StructuralError(std::string(what) + ": matrix is not symmetric");
}

/// Isometric vectorization: column-major lower triangle, off-diagonals
/// scaled by sqrt(2), so that svec(A).dot(svec(B)) == trace(A * B).
template <typename Derived>
Vector<typename Derived::Scalar> svec(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_symmetric(m, "svec");
  const Scalar root2 = std::sqrt(Scalar(2));
  const Eigen::Index d = m.rows();
  Vector<Scalar> v(svec_length(d));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    v(k++) = m(j, j);
    for (Eigen::Index i = j + 1; i < d; ++i) v(k++) = root2 * m(i, j);
  }
  return v;
}

/// Inverse of svec.
template <typename Derived>
Matrix<typename Derived::Scalar> smat(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index d = side_from_svec_length(v.size());
  if (d < 0) throw StructuralError("smat: length " + std::to_string(v.size()) + " is not triangular");
  const Scalar inv_root2 = Scalar(1) / std::sqrt(Scalar(2));
  Matrix<Scalar> m(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    m(j, j) = v(k++);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      m(i, j) = inv_root2 * v(k++);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

/// Cholesky factor L with L * L^T == m, or nullopt when a pivot drops
/// below 1e-12 times the largest diagonal entry (not positive definite).
template <typename Derived>
std::optional<Matrix<typename Derived::Scalar>> factor_spd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_symmetric(m, "factor_spd");
  const Eigen::Index d = m.rows();
  Matrix<Scalar> l = Matrix<Scalar>::Zero(d, d);
  if (d == 0) return l;
  const Scalar max_diag = m.diagonal().maxCoeff();
  if (!(max_diag > Scalar(0))) return std::nullopt;
  const Scalar pivot_tol = Scalar(1e-12) * max_diag;
  for (Eigen::Index j = 0; j < d; ++j) {
    Scalar pivot = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > pivot_tol)) return std::nullopt;
    const Scalar root = std::sqrt(pivot);
    l(j, j) = root;
    for (Eigen::Index i = j + 1; i < d; ++i)
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / root;
  }
  return l;
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_symmetric(m, "min_eigenvalue");
  if (m.rows() == 0) return Scalar(0);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(m.eval(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

/// Frobenius inner product A . B = trace(A^T B).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar frobenius_dot(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace drrbdo::conic

#endif  // DRRBDO_CONIC_SYMMETRIC_HPP
