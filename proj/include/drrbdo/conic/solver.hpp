#ifndef DRRBDO_CONIC_SOLVER_HPP
#define DRRBDO_CONIC_SOLVER_HPP

// Dense primal-dual path-following solver for
//
//   minimize    c^T y
//   subject to  G y + s = h,   s in K
//
// with K a product of nonnegative orthants, second-order cones and PSD
// cones (svec coordinates). The dual is
//
//   maximize   -h^T z
//   subject to  G^T z + c = 0,  z in K.
//
// Each iteration symmetrizes with the Nesterov-Todd scaling W (W z = W^-T s
// = lambda), takes a Mehrotra predictor-corrector step and reduces the
// search direction to the normal equations (W^-T G)^T (W^-T G) dy = r.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "drrbdo/conic/cone.hpp"
#include "drrbdo/conic/symmetric.hpp"

namespace drrbdo::conic {

namespace detail {

template <typename Scalar>
struct BlockScaling {
  ConeKind kind{};
  Eigen::Index side = 0;
  Vector<Scalar> d;        // nonneg: W = diag(d)
  Matrix<Scalar> w;        // soc: W (symmetric)
  Matrix<Scalar> w_inv;    // soc: W^-1
  Matrix<Scalar> r;        // psd: W z = svec(r^T Z r)
  Matrix<Scalar> r_inv;
  Vector<Scalar> lambda;   // scaled point, slack coordinates
  Vector<Scalar> lambda_eig;  // psd: diagonal of Lambda
};

template <typename Scalar>
Vector<Scalar> identity_element(const ConeBlock& b) {
  Vector<Scalar> e = Vector<Scalar>::Zero(b.slack_length());
  switch (b.kind) {
    case ConeKind::kNonneg: e.setOnes(); break;
    case ConeKind::kSoc: e(0) = 1; break;
    case ConeKind::kPsd: e = svec(Matrix<Scalar>::Identity(b.dim, b.dim)); break;
  }
  return e;
}

// Jordan product u o v.
template <typename Scalar>
Vector<Scalar> jordan_product(const ConeBlock& b, const Vector<Scalar>& u, const Vector<Scalar>& v) {
  switch (b.kind) {
    case ConeKind::kNonneg: return u.cwiseProduct(v);
    case ConeKind::kSoc: {
      Vector<Scalar> out(u.size());
      out(0) = u.dot(v);
      out.tail(u.size() - 1) = u(0) * v.tail(v.size() - 1) + v(0) * u.tail(u.size() - 1);
      return out;
    }
    case ConeKind::kPsd: {
      const Matrix<Scalar> um = smat(u), vm = smat(v);
      const Matrix<Scalar> p = um * vm;
      return svec(Matrix<Scalar>((p + p.transpose()) / Scalar(2)));
    }
  }
  return {};
}

// Solves lambda o x = rhs for x, with lambda the scaled point of the block.
template <typename Scalar>
Vector<Scalar> jordan_divide(const ConeBlock& b, const BlockScaling<Scalar>& sc,
                             const Vector<Scalar>& rhs) {
  const Vector<Scalar>& lam = sc.lambda;
  switch (b.kind) {
    case ConeKind::kNonneg: return rhs.cwiseQuotient(lam);
    case ConeKind::kSoc: {
      const Eigen::Index m = lam.size() - 1;
      const Scalar det = lam(0) * lam(0) - lam.tail(m).squaredNorm();
      Vector<Scalar> x(lam.size());
      x(0) = (lam(0) * rhs(0) - lam.tail(m).dot(rhs.tail(m))) / det;
      x.tail(m) = (rhs.tail(m) - x(0) * lam.tail(m)) / lam(0);
      return x;
    }
    case ConeKind::kPsd: {
      Matrix<Scalar> rm = smat(rhs);
      const auto& l = sc.lambda_eig;
      for (Eigen::Index j = 0; j < rm.cols(); ++j)
        for (Eigen::Index i = 0; i < rm.rows(); ++i) rm(i, j) *= Scalar(2) / (l(i) + l(j));
      return svec(rm);
    }
  }
  return {};
}

// Largest t such that v + t e lies on the cone boundary (negative when
// v is interior).
template <typename Scalar>
Scalar boundary_shift(const ConeBlock& b, const Vector<Scalar>& v) {
  switch (b.kind) {
    case ConeKind::kNonneg: return -v.minCoeff();
    case ConeKind::kSoc: return v.tail(v.size() - 1).norm() - v(0);
    case ConeKind::kPsd: return -min_eigenvalue(smat(v));
  }
  return 0;
}

// Largest step a with lambda + a d in the cone; +inf when unbounded.
template <typename Scalar>
Scalar max_step(const ConeBlock& b, const BlockScaling<Scalar>& sc, const Vector<Scalar>& d) {
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Vector<Scalar>& lam = sc.lambda;
  switch (b.kind) {
    case ConeKind::kNonneg: {
      Scalar step = inf;
      for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) < 0) step = std::min(step, -lam(i) / d(i));
      return step;
    }
    case ConeKind::kSoc: {
      const Eigen::Index m = lam.size() - 1;
      const Scalar lnorm = std::sqrt(lam(0) * lam(0) - lam.tail(m).squaredNorm());
      const Vector<Scalar> lbar = lam / lnorm;
      const Scalar factor = lbar(0) * d(0) - lbar.tail(m).dot(d.tail(m));
      const Scalar rho0 = factor / lnorm;
      const Vector<Scalar> rho1 =
          (d.tail(m) - (factor + d(0)) / (lbar(0) + 1) * lbar.tail(m)) / lnorm;
      const Scalar t = rho1.norm() - rho0;
      return t > 0 ? Scalar(1) / t : inf;
    }
    case ConeKind::kPsd: {
      const Vector<Scalar> inv_sqrt = sc.lambda_eig.cwiseSqrt().cwiseInverse();
      const Matrix<Scalar> dm = inv_sqrt.asDiagonal() * smat(d) * inv_sqrt.asDiagonal();
      const Scalar lo = min_eigenvalue(Matrix<Scalar>((dm + dm.transpose()) / Scalar(2)));
      return lo < 0 ? Scalar(-1) / lo : inf;
    }
  }
  return inf;
}

template <typename Scalar>
bool interior(const ConeBlock& b, const Vector<Scalar>& v) {
  switch (b.kind) {
    case ConeKind::kNonneg: return v.minCoeff() > 0;
    case ConeKind::kSoc: return v(0) > 0 && v(0) * v(0) - v.tail(v.size() - 1).squaredNorm() > 0;
    case ConeKind::kPsd: {
      // plain Cholesky: near the optimum the slack is legitimately
      // ill-conditioned, so no relative pivot threshold here
      const Eigen::LLT<Matrix<Scalar>> llt(smat(v));
      return llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0;
    }
  }
  return false;
}

template <typename Scalar>
bool compute_scaling(const ConeBlock& b, const Vector<Scalar>& s, const Vector<Scalar>& z,
                     BlockScaling<Scalar>& sc) {
  sc.kind = b.kind;
  sc.side = b.dim;
  switch (b.kind) {
    case ConeKind::kNonneg: {
      if (s.minCoeff() <= 0 || z.minCoeff() <= 0) return false;
      sc.d = s.cwiseQuotient(z).cwiseSqrt();
      sc.lambda = s.cwiseProduct(z).cwiseSqrt();
      return true;
    }
    case ConeKind::kSoc: {
      const Eigen::Index m = s.size() - 1;
      const Scalar sdet = s(0) * s(0) - s.tail(m).squaredNorm();
      const Scalar zdet = z(0) * z(0) - z.tail(m).squaredNorm();
      if (!(sdet > 0 && zdet > 0 && s(0) > 0 && z(0) > 0)) return false;
      const Scalar snorm = std::sqrt(sdet), znorm = std::sqrt(zdet);
      const Scalar beta = std::sqrt(snorm / znorm);
      const Vector<Scalar> sbar = s / snorm, zbar = z / znorm;
      const Scalar gamma = std::sqrt((Scalar(1) + sbar.dot(zbar)) / Scalar(2));
      Vector<Scalar> wbar(s.size());
      wbar(0) = (sbar(0) + zbar(0)) / (Scalar(2) * gamma);
      wbar.tail(m) = (sbar.tail(m) - zbar.tail(m)) / (Scalar(2) * gamma);
      const Scalar w0 = wbar(0);
      const auto w1 = wbar.tail(m);
      Matrix<Scalar> core(s.size(), s.size());
      core(0, 0) = w0;
      core.block(0, 1, 1, m) = w1.transpose();
      core.block(1, 0, m, 1) = w1;
      core.block(1, 1, m, m) = Matrix<Scalar>::Identity(m, m) + w1 * w1.transpose() / (Scalar(1) + w0);
      sc.w = beta * core;
      core.block(0, 1, 1, m) *= Scalar(-1);
      core.block(1, 0, m, 1) *= Scalar(-1);
      sc.w_inv = core / beta;
      sc.lambda = sc.w * z;
      return true;
    }
    case ConeKind::kPsd: {
      const Matrix<Scalar> sm = smat(s), zm = smat(z);
      Eigen::LLT<Matrix<Scalar>> ls(sm), lz(zm);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      const Matrix<Scalar> lsm = ls.matrixL(), lzm = lz.matrixL();
      Eigen::JacobiSVD<Matrix<Scalar>> svd(lzm.transpose() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Vector<Scalar> sv = svd.singularValues();
      if (!(sv.minCoeff() > 0)) return false;
      const Vector<Scalar> inv_sqrt = sv.cwiseSqrt().cwiseInverse();
      sc.r = lsm * svd.matrixV() * inv_sqrt.asDiagonal();
      sc.r_inv = inv_sqrt.asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
      sc.lambda_eig = sv;
      sc.lambda = svec(Matrix<Scalar>(sv.asDiagonal()));
      return true;
    }
  }
  return false;
}

enum class Apply { kW, kWInvT, kWT, kWInv };

template <typename Scalar>
Vector<Scalar> apply_scaling(const BlockScaling<Scalar>& sc, Apply op, const Vector<Scalar>& v) {
  switch (sc.kind) {
    case ConeKind::kNonneg:
      return (op == Apply::kW || op == Apply::kWT) ? Vector<Scalar>(sc.d.cwiseProduct(v))
                                                   : Vector<Scalar>(v.cwiseQuotient(sc.d));
    case ConeKind::kSoc:
      return (op == Apply::kW || op == Apply::kWT) ? Vector<Scalar>(sc.w * v)
                                                   : Vector<Scalar>(sc.w_inv * v);
    case ConeKind::kPsd: {
      const Matrix<Scalar> m = smat(v);
      Matrix<Scalar> out;
      switch (op) {
        case Apply::kW: out = sc.r.transpose() * m * sc.r; break;
        case Apply::kWInvT: out = sc.r_inv * m * sc.r_inv.transpose(); break;
        case Apply::kWT: out = sc.r * m * sc.r.transpose(); break;
        case Apply::kWInv: out = sc.r_inv.transpose() * m * sc.r_inv; break;
      }
      return svec(Matrix<Scalar>((out + out.transpose()) / Scalar(2)));
    }
  }
  return {};
}

}  // namespace detail

template <typename Scalar>
class ConeSolver {
 public:
  explicit ConeSolver(SolverSettings settings = {}) : settings_(settings) {}

  const SolverSettings& settings() const { return settings_; }

  ConeSolution<Scalar> solve(const ConeProgram<Scalar>& program) const;

 private:
  SolverSettings settings_;
};

template <typename Scalar>
ConeSolution<Scalar> solve(const ConeProgram<Scalar>& program, const SolverSettings& settings = {}) {
  return ConeSolver<Scalar>(settings).solve(program);
}

template <typename Scalar>
ConeSolution<Scalar> ConeSolver<Scalar>::solve(const ConeProgram<Scalar>& program) const {
  using detail::Apply;
  program.validate();
  const auto& cones = program.cones;
  const auto& G = program.G;
  const auto& h = program.h;
  const auto& c = program.objective;
  const Eigen::Index n = c.size();
  const Eigen::Index m = h.size();
  const std::size_t nb = cones.size();
  const Scalar tol = Scalar(settings_.tolerance);

  std::vector<Eigen::Index> off(nb);
  for (std::size_t k = 0; k < nb; ++k) off[k] = cones.offset(k);
  auto seg = [&](auto& v, std::size_t k) { return v.segment(off[k], cones[k].slack_length()); };

  // Apply a per-block operator to a whole slack-space vector.
  std::vector<detail::BlockScaling<Scalar>> sc(nb);
  auto apply = [&](Apply op, const Vector<Scalar>& v) {
    Vector<Scalar> out(m);
    for (std::size_t k = 0; k < nb; ++k)
      seg(out, k) = detail::apply_scaling(sc[k], op, Vector<Scalar>(seg(v, k)));
    return out;
  };

  ConeSolution<Scalar> sol;
  std::ostringstream diag;

  // Starting point: least-squares fit of G y ~ h - s with s = -z, then
  // both shifted into the interior.
  Vector<Scalar> y(n), s(m), z(m);
  {
    Eigen::LDLT<Matrix<Scalar>> gtg(G.transpose() * G);
    if (gtg.info() != Eigen::Success || (n > 0 && !(gtg.vectorD().cwiseAbs().minCoeff() > 0))) {
      sol.status = SolveStatus::kMaxIterations;
      sol.diagnostics = "constraint map G is rank deficient";
      return sol;
    }
    y = gtg.solve(G.transpose() * h - c);
    s = h - G * y;
    z = -s;
    Scalar ts = -std::numeric_limits<Scalar>::infinity();
    Scalar tz = ts;
    for (std::size_t k = 0; k < nb; ++k) {
      ts = std::max(ts, detail::boundary_shift(cones[k], Vector<Scalar>(seg(s, k))));
      tz = std::max(tz, detail::boundary_shift(cones[k], Vector<Scalar>(seg(z, k))));
    }
    const Scalar nrms = std::max(Scalar(1), s.norm()), nrmz = std::max(Scalar(1), z.norm());
    for (std::size_t k = 0; k < nb; ++k) {
      const Vector<Scalar> e = detail::identity_element<Scalar>(cones[k]);
      if (ts >= -Scalar(1e-8) * nrms) seg(s, k) += (Scalar(1) + ts) * e;
      if (tz >= -Scalar(1e-8) * nrmz) seg(z, k) += (Scalar(1) + tz) * e;
    }
  }

  const Scalar resx0 = std::max(Scalar(1), c.norm());
  const Scalar resz0 = std::max(Scalar(1), h.norm());
  const Scalar z0norm = std::max(Scalar(1), z.norm());
  const Scalar y0norm = std::max(Scalar(1), y.norm());
  const Scalar degree = Scalar(cones.degree());
  const Scalar divergence = Scalar(settings_.divergence_ratio);

  Matrix<Scalar> gs(m, n);
  Matrix<Scalar> hmat(n, n);

  auto finish = [&](SolveStatus status, int iters) {
    sol.status = status;
    sol.y = y;
    sol.slack = h - G * y;
    sol.duals.clear();
    for (std::size_t k = 0; k < nb; ++k) sol.duals.emplace_back(seg(z, k));
    sol.primal_objective = c.dot(y);
    sol.dual_objective = -h.dot(z);
    sol.iterations = iters;
    sol.diagnostics = diag.str();
    return sol;
  };

  for (int it = 0;; ++it) {
    const Vector<Scalar> rx = G.transpose() * z + c;
    const Vector<Scalar> rz = G * y + s - h;
    const Scalar gap = s.dot(z);
    const Scalar pcost = c.dot(y);
    sol.primal_residual = rz.norm() / resz0;
    sol.dual_residual = rx.norm() / resx0;
    sol.gap_residual = gap / (Scalar(1) + std::abs(pcost));
    sol.log.push_back({it, pcost, pcost - gap, sol.primal_residual, sol.dual_residual,
                       sol.gap_residual, Scalar(0)});

    if (sol.primal_residual <= tol && sol.dual_residual <= tol && sol.gap_residual <= tol)
      return finish(SolveStatus::kOptimal, it);

    const Scalar hz = h.dot(z);
    if (hz < 0 && z.norm() > divergence * z0norm) {
      diag << "dual iterate diverged (|z| = " << z.norm() << ") with h'z < 0";
      return finish(SolveStatus::kPrimalInfeasible, it);
    }
    if (pcost < 0 && y.norm() > divergence * y0norm) {
      diag << "primal iterate diverged (|y| = " << y.norm() << ") with c'y < 0";
      return finish(SolveStatus::kDualInfeasible, it);
    }
    if (it >= settings_.max_iterations) {
      diag << "iteration cap " << settings_.max_iterations << " reached";
      return finish(SolveStatus::kMaxIterations, it);
    }

    for (std::size_t k = 0; k < nb; ++k) {
      if (!detail::compute_scaling(cones[k], Vector<Scalar>(seg(s, k)), Vector<Scalar>(seg(z, k)), sc[k])) {
        diag << "numerical breakdown: scaling failed in block " << k << " at iteration " << it;
        return finish(SolveStatus::kMaxIterations, it);
      }
    }
    Vector<Scalar> lambda(m);
    for (std::size_t k = 0; k < nb; ++k) seg(lambda, k) = sc[k].lambda;

    // Scaled constraint map W^-T G, block by block; zero columns stay zero.
    for (std::size_t k = 0; k < nb; ++k) {
      const Eigen::Index len = cones[k].slack_length();
      auto gblock = G.middleRows(off[k], len);
      auto out = gs.middleRows(off[k], len);
      if (sc[k].kind == ConeKind::kNonneg) {
        out = sc[k].d.cwiseInverse().asDiagonal() * gblock;
      } else if (sc[k].kind == ConeKind::kSoc) {
        out.noalias() = sc[k].w_inv * gblock;
      } else {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (gblock.col(j).isZero(0)) {
            out.col(j).setZero();
          } else {
            out.col(j) = detail::apply_scaling(sc[k], Apply::kWInvT, Vector<Scalar>(gblock.col(j)));
          }
        }
      }
    }
    hmat.setZero();
    hmat.template selfadjointView<Eigen::Lower>().rankUpdate(gs.transpose());
    hmat.template triangularView<Eigen::StrictlyUpper>() = hmat.transpose();
    Eigen::LLT<Matrix<Scalar>> chol(hmat);
    if (chol.info() != Eigen::Success) {
      const Scalar reg = Scalar(1e-13) * std::max(Scalar(1), hmat.diagonal().maxCoeff());
      chol.compute(hmat + reg * Matrix<Scalar>::Identity(n, n));
      if (chol.info() != Eigen::Success) {
        diag << "numerical breakdown: reduced system not positive definite at iteration " << it;
        return finish(SolveStatus::kMaxIterations, it);
      }
    }

    const Vector<Scalar> scaled_rz = apply(Apply::kWInvT, rz);
    struct Direction {
      Vector<Scalar> dy, ds, dz;  // ds, dz in scaled coordinates
    };
    // Solves  G^T dz = -rx,  G dy + ds = -rz,  lambda o (W dz + W^-T ds) = lambda o q.
    auto newton = [&](const Vector<Scalar>& q) {
      Direction d;
      const Vector<Scalar> rhs = -rx - gs.transpose() * (scaled_rz + q);
      d.dy = chol.solve(rhs);
      d.dy += chol.solve(Vector<Scalar>(rhs - gs.transpose() * (gs * d.dy)));
      d.dz = gs * d.dy + scaled_rz + q;
      d.ds = q - d.dz;
      return d;
    };
    auto step_to_boundary = [&](const Direction& d) {
      Scalar step = std::numeric_limits<Scalar>::infinity();
      for (std::size_t k = 0; k < nb; ++k) {
        step = std::min(step, detail::max_step(cones[k], sc[k], Vector<Scalar>(seg(d.ds, k))));
        step = std::min(step, detail::max_step(cones[k], sc[k], Vector<Scalar>(seg(d.dz, k))));
      }
      return step;
    };

    const Direction affine = newton(-lambda);
    const Scalar affine_step = std::min(Scalar(1), step_to_boundary(affine));
    const Scalar sigma = std::pow(Scalar(1) - affine_step, 3);
    const Scalar mu = gap / degree;

    Vector<Scalar> q(m);
    for (std::size_t k = 0; k < nb; ++k) {
      const Vector<Scalar> dsa = seg(affine.ds, k), dza = seg(affine.dz, k);
      const Vector<Scalar> lam = sc[k].lambda;
      Vector<Scalar> rc = -detail::jordan_product(cones[k], lam, lam) -
                          detail::jordan_product(cones[k], dsa, dza) +
                          sigma * mu * detail::identity_element<Scalar>(cones[k]);
      seg(q, k) = detail::jordan_divide(cones[k], sc[k], rc);
    }
    const Direction dir = newton(q);
    Scalar step = std::min(Scalar(1), Scalar(settings_.step_fraction) * step_to_boundary(dir));

    const Vector<Scalar> ds = apply(Apply::kWT, dir.ds);
    const Vector<Scalar> dz = apply(Apply::kWInv, dir.dz);
    Vector<Scalar> s_new, z_new;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 30; ++backtrack) {
      s_new = s + step * ds;
      z_new = z + step * dz;
      bool ok = true;
      for (std::size_t k = 0; k < nb && ok; ++k)
        ok = detail::interior(cones[k], Vector<Scalar>(seg(s_new, k))) &&
             detail::interior(cones[k], Vector<Scalar>(seg(z_new, k)));
      if (ok) {
        accepted = true;
        break;
      }
      step *= Scalar(0.8);
    }
    if (!accepted) {
      diag << "numerical breakdown: no interior step at iteration " << it;
      return finish(SolveStatus::kMaxIterations, it);
    }
    y += step * dir.dy;
    s = s_new;
    z = z_new;
    sol.log.back().step = step;
  }
}

extern template class ConeSolver<double>;

}  // namespace drrbdo::conic

#endif  // DRRBDO_CONIC_SOLVER_HPP
