#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "drrbdo/conic/builder.hpp"
#include "drrbdo/conic/solver.hpp"
#include "drrbdo/conic/symmetric.hpp"
#include "drrbdo/errors.hpp"
#include "drrbdo/robust/sequential.hpp"
#include "test_paths.hpp"

namespace drrbdo::robust {
namespace {

// Phi by its Maclaurin series in long double; accurate to ~1e-15 for |x| < 4.
double series_cdf(double x) {
  long double term = x, sum = x;
  const long double x2 = (long double)x * x;
  for (int k = 1; k < 200; ++k) {
    term *= -x2 / (2.0L * k);
    sum += term / (2 * k + 1);
  }
  return double(0.5L + sum / std::sqrt(2.0L * 3.14159265358979323846L));
}

double bisection_quantile(double p) {
  double lo = -8, hi = 8;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (series_cdf(mid) < p ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

MatrixXd random_spd(std::mt19937_64& rng, Index d, double shift = 0.1) {
  std::normal_distribution<double> n01;
  MatrixXd a(d, d);
  for (auto& v : a.reshaped()) v = n01(rng);
  return a * a.transpose() + shift * MatrixXd::Identity(d, d);
}

MomentUncertainty two_bar_uncertainty(NormKind norm, double alpha = 0.2, double beta = 0.01) {
  MatrixXd sigma(2, 2);
  sigma << 0.07, 0.02, 0.02, 0.07;
  return MomentUncertainty::isotropic(VectorXd::Zero(2), sigma, alpha, beta, norm);
}

TEST(NormalQuantile, MatchesBisectionOracle) {
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_NEAR(normal_quantile(0.975), 1.959964, 1e-5);
  EXPECT_NEAR(normal_quantile(0.01), -2.326348, 1e-5);
  for (double p : {1e-6, 0.001, 0.01, 0.1, 0.3, 0.7, 0.9, 0.99, 0.999}) {
    EXPECT_NEAR(normal_quantile(p), bisection_quantile(p), 1e-9) << p;
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12) << p;
  }
  EXPECT_THROW(normal_quantile(0), DomainError);
  EXPECT_THROW(normal_quantile(1), DomainError);
  EXPECT_THROW(normal_quantile(-0.1), DomainError);
}

TEST(Kappa, ClosedFormValues) {
  EXPECT_EQ(kappa({0.5, DistributionFamily::kGaussian}), 0.0);
  EXPECT_EQ(kappa({0.5, DistributionFamily::kAll}), 1.0);
  EXPECT_EQ(kappa({0.01, DistributionFamily::kAll}), std::sqrt(99.0));
  EXPECT_NEAR(kappa({0.01, DistributionFamily::kGaussian}), 2.326348, 1e-5);
  EXPECT_THROW(robust_kappa({0.5, DistributionFamily::kGaussian}), DomainError);
  EXPECT_THROW(robust_kappa({0.6, DistributionFamily::kAll}), DomainError);
  EXPECT_THROW(kappa({0.0, DistributionFamily::kAll}), DomainError);
}

TEST(Kappa, MonotoneAndDistributionFreeDominates) {
  double prev_g = INFINITY, prev_a = INFINITY;
  for (int i = 1; i < 500; ++i) {
    const double eps = i / 1000.0;
    const double g = kappa({eps, DistributionFamily::kGaussian});
    const double a = kappa({eps, DistributionFamily::kAll});
    EXPECT_LT(g, prev_g);
    EXPECT_LT(a, prev_a);
    EXPECT_GE(a, g);
    prev_g = g;
    prev_a = a;
  }
}

TEST(DeterministicMargin, Examples) {
  const LinearizedConstraint con{-1, (VectorXd(2) << 1, 0).finished()};
  EXPECT_DOUBLE_EQ(deterministic_margin(con, VectorXd::Zero(2), MatrixXd::Identity(2, 2), 2), 1.0);
  const VectorXd mu = (VectorXd(2) << 0.3, 5).finished();
  EXPECT_DOUBLE_EQ(deterministic_margin(con, mu, MatrixXd::Identity(2, 2), 0), -0.7);
  MatrixXd bad(2, 2);
  bad << 1, 0.5, 0, 1;
  EXPECT_THROW(deterministic_margin(con, mu, bad, 1), StructuralError);
}

TEST(DeterministicMargin, SignAgreesWithGaussianSimulation) {
  std::mt19937_64 rng(3);
  const Index n = 3;
  const MatrixXd sigma = random_spd(rng, n);
  const VectorXd mu = VectorXd::LinSpaced(n, -0.2, 0.4);
  const VectorXd grad = (VectorXd(n) << 1.0, -0.5, 2.0).finished();
  const double eps = 0.05;
  const double k = kappa({eps, DistributionFamily::kGaussian});
  const Eigen::LLT<MatrixXd> llt(sigma);
  const int count = 1'000'000;
  std::vector<double> lin(count);
  std::normal_distribution<double> n01;
  for (auto& v : lin) {
    VectorXd w(n);
    for (auto& e : w) e = n01(rng);
    v = grad.dot(mu + llt.matrixL() * w);
  }
  const double slack = 3 * std::sqrt(eps / count);
  const double spread = std::sqrt(grad.dot(sigma * grad));
  for (double shift : {-0.05, 0.05}) {
    // pick g so the margin is shift * spread
    const LinearizedConstraint con{shift * spread - grad.dot(mu) - k * spread, grad};
    const double margin = deterministic_margin(con, mu, sigma, k);
    int fails = 0;
    for (double v : lin) fails += con.value + v > 0;
    const double freq = double(fails) / count;
    EXPECT_EQ(margin <= 0, freq <= eps + slack) << "margin " << margin << " frequency " << freq;
  }
}

TEST(WorstMeanTerm, Examples) {
  const LinearizedConstraint con{0, (VectorXd(2) << 1, -2).finished()};
  const MatrixXd sigma = MatrixXd::Identity(2, 2);
  EXPECT_NEAR(worst_mean_term(con, MomentUncertainty::isotropic(VectorXd::Zero(2), sigma, 0.2, 0, NormKind::kLinf)),
              0.6, 1e-15);
  EXPECT_NEAR(worst_mean_term(con, MomentUncertainty::isotropic(VectorXd::Zero(2), sigma, 0.2, 0, NormKind::kL2)),
              0.2 * std::sqrt(5.0), 1e-15);
}

TEST(WorstMeanTerm, EqualsSampledMaximum) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  std::normal_distribution<double> n01;
  const Index n = 3, m = 2;
  MomentUncertainty unc = MomentUncertainty::isotropic(VectorXd::Constant(n, 0.1), random_spd(rng, n), 0.3, 0,
                                                       NormKind::kLinf);
  unc.A = MatrixXd::NullaryExpr(n, m, [&] { return u(rng); });
  const LinearizedConstraint con{0, (VectorXd(n) << 0.7, -1.1, 0.4).finished()};
  const VectorXd at = unc.A.transpose() * con.gradient;
  for (NormKind norm : {NormKind::kLinf, NormKind::kL2}) {
    unc.norm = norm;
    const double closed = worst_mean_term(con, unc);
    // exact maximizer first, then uniform draws from the ball
    VectorXd best = norm == NormKind::kLinf ? VectorXd(unc.alpha * at.cwiseSign()) : VectorXd(unc.alpha * at.normalized());
    double sampled = con.gradient.dot(unc.mu_tilde + unc.A * best);
    for (int i = 0; i < 100'000; ++i) {
      VectorXd z(m);
      if (norm == NormKind::kLinf) {
        for (auto& v : z) v = unc.alpha * u(rng);
      } else {
        for (auto& v : z) v = n01(rng);
        z *= unc.alpha * std::sqrt(0.5 * (u(rng) + 1)) / z.norm();
      }
      sampled = std::max(sampled, con.gradient.dot(unc.mu_tilde + unc.A * z));
    }
    EXPECT_LE(sampled, closed * (1 + 1e-12));
    EXPECT_GE(sampled, closed * (1 - 1e-3));
  }
}

TEST(WorstVariance, ConicMinimumEqualsClosedForm) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + trial % 5;
    const double k = 0.1 + 4.9 * u(rng);
    const MatrixXd sigma = random_spd(rng, n, 0.05);
    VectorXd g(n);
    for (auto& v : g) v = n01(rng);
    const auto unc = MomentUncertainty::isotropic(VectorXd::Zero(n), sigma, 0, 0, NormKind::kLinf);
    const ReliabilitySpec spec{normal_cdf(-k), DistributionFamily::kGaussian};
    const auto cert = worst_case_certificate({0, g}, unc, spec);
    const double closed = kappa(spec) * std::sqrt(g.dot(sigma * g));
    EXPECT_NEAR(cert.margin.total(), closed, 1e-6 * closed) << "trial " << trial;
  }
}

TEST(SchurComplement, BlockPsdIffReducedPsd) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> n01;
  int agree = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 2 + trial % 3;
    MatrixXd w = random_spd(rng, n, 0.01) * u(rng);
    VectorXd g(n);
    for (auto& v : g) v = n01(rng);
    const double z = 0.05 + 2 * u(rng);
    MatrixXd block(n + 1, n + 1);
    block << w, g / 2, g.transpose() / 2, z;
    const double lhs = conic::min_eigenvalue(block);
    const double rhs = conic::min_eigenvalue(MatrixXd(z * w - g * g.transpose() / 4));
    if (std::abs(lhs) < 1e-9 || std::abs(rhs) < 1e-9) continue;
    EXPECT_EQ(lhs >= 0, rhs >= 0);
    ++agree;
  }
  EXPECT_GT(agree, 250);
}

// Sampled (mu, Sigma) from U, Sigma kept only when positive semidefinite.
double sampled_worst_margin(const LinearizedConstraint& con, const MomentUncertainty& unc, double k, int count,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::normal_distribution<double> n01;
  const Index n = unc.dimension();
  const Index len = conic::svec_length(n);
  double best = -INFINITY;
  auto draw = [&](Index dim, double radius) {
    VectorXd v(dim);
    if (unc.norm == NormKind::kLinf) {
      for (auto& e : v) e = radius * u(rng);
    } else {
      for (auto& e : v) e = n01(rng);
      v *= radius * std::pow(0.5 * (u(rng) + 1), 1.0 / double(dim)) / v.norm();
    }
    return v;
  };
  for (int i = 0; i < count; ++i) {
    const VectorXd mu = unc.mu_tilde + unc.A * draw(unc.A.cols(), unc.alpha);
    MatrixXd z2;
    if (unc.norm == NormKind::kLinf) {
      z2 = conic::smat(draw(len, unc.beta));
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < a; ++b) z2(a, b) = z2(b, a) = z2(a, b) * std::sqrt(2.0);
    } else {
      z2 = conic::smat(draw(len, unc.beta));
    }
    const MatrixXd sigma = unc.sigma_tilde + unc.B * z2 * unc.B.transpose();
    if (conic::min_eigenvalue(sigma) < 0) continue;
    best = std::max(best, deterministic_margin(con, mu, sigma, k));
  }
  return best;
}

TEST(Minimax, CertificateBoundsSampledMomentsTightly) {
  std::mt19937_64 rng(77);
  const ReliabilitySpec spec{0.05, DistributionFamily::kGaussian};
  for (NormKind norm : {NormKind::kLinf, NormKind::kL2}) {
    for (int trial = 0; trial < 3; ++trial) {
      auto unc = MomentUncertainty::isotropic(VectorXd::Zero(2), random_spd(rng, 2, 0.2), 0.2, 0.1, norm);
      const LinearizedConstraint con{0, (VectorXd(2) << 1.0, 0.3 * (trial - 1)).finished()};
      const auto cert = worst_case_certificate(con, unc, spec);
      const double dual = cert.margin.total();
      const double sampled = sampled_worst_margin(con, unc, kappa(spec), 100'000, rng);
      EXPECT_GE(dual, sampled - 1e-8);
      EXPECT_LE(dual - sampled, 0.02 * dual) << "norm " << to_string(norm) << " trial " << trial;
    }
  }
}

TEST(SetNesting, L2BallInsideLinfBox) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0, 1);
  const double beta = 0.3;
  for (int i = 0; i < 10000; ++i) {
    VectorXd v(6);
    for (auto& e : v) e = n01(rng);
    v *= beta * std::pow(u(rng), 1.0 / 6) / v.norm();
    EXPECT_LE(conic::smat(v).cwiseAbs().maxCoeff(), beta);
  }
}

TEST(RobustMargin, MonotoneInAlphaBetaKappa) {
  std::mt19937_64 rng(12);
  const auto unc0 = MomentUncertainty::isotropic(VectorXd::Zero(3), random_spd(rng, 3), 0.1, 0.05, NormKind::kLinf);
  const LinearizedConstraint con{-3, (VectorXd(3) << 1, -2, 0.5).finished()};
  const MatrixXd w = random_spd(rng, 3);
  const double z = 0.7;
  for (NormKind norm : {NormKind::kLinf, NormKind::kL2}) {
    auto unc = unc0;
    unc.norm = norm;
    double prev = robust_margin(con, unc, {0.2, DistributionFamily::kGaussian}, w, z).total();
    for (int step = 0; step < 5; ++step) {
      unc.alpha += 0.05;
      const double a = robust_margin(con, unc, {0.2, DistributionFamily::kGaussian}, w, z).total();
      unc.beta += 0.05;
      const double b = robust_margin(con, unc, {0.2, DistributionFamily::kGaussian}, w, z).total();
      const double c = robust_margin(con, unc, {0.1, DistributionFamily::kGaussian}, w, z).total();
      EXPECT_GE(a, prev);
      EXPECT_GE(b, a);
      EXPECT_GE(c, b);
      prev = b;
    }
  }
}

TEST(Subproblem, VariableAndConeCounts) {
  const auto model = truss::TrussModel::load(test_paths::problem("two_bar.json"));
  const ReliabilitySpec spec{0.01, DistributionFamily::kGaussian};
  const VectorXd h = (VectorXd(2) << -3.3, -2.4).finished();
  const auto linf = assemble_subproblem(model, h, two_bar_uncertainty(NormKind::kLinf), spec);
  EXPECT_EQ(linf.program.G.cols(), 10);
  EXPECT_EQ(linf.program.cones, conic::ConeSpec().nonneg(2 + 2 * 3 + 1).psd(3).psd(3));
  const auto l2 = assemble_subproblem(model, h, two_bar_uncertainty(NormKind::kL2), spec);
  EXPECT_EQ(l2.program.G.cols(), 8);
  EXPECT_EQ(l2.program.cones, conic::ConeSpec().nonneg(2 + 1).psd(3).psd(3).soc(4));
  const auto nominal = assemble_nominal(model);
  EXPECT_EQ(nominal.program.G.cols(), 2);
  EXPECT_EQ(nominal.program.cones, conic::ConeSpec().nonneg(2).psd(3));
}

TEST(Subproblem, RejectsUnusableInputs) {
  const auto model = truss::TrussModel::load(test_paths::problem("two_bar.json"));
  const VectorXd h = (VectorXd(2) << -3.3, -2.4).finished();
  EXPECT_THROW(assemble_subproblem(model, h, two_bar_uncertainty(NormKind::kLinf),
                                   {0.5, DistributionFamily::kGaussian}),
               DomainError);
  EXPECT_THROW(assemble_subproblem(model, VectorXd::Ones(3), two_bar_uncertainty(NormKind::kLinf),
                                   {0.01, DistributionFamily::kGaussian}),
               StructuralError);
  // alpha ||h||_1 = 100 * 1000 > pi_bar = 100
  try {
    assemble_subproblem(model, VectorXd::Constant(2, 1000), two_bar_uncertainty(NormKind::kLinf, 100),
                        {0.01, DistributionFamily::kGaussian});
    FAIL() << "expected InfeasibleBudgetError";
  } catch (const InfeasibleBudgetError& e) {
    EXPECT_DOUBLE_EQ(e.pi_bar, 100.0);
    EXPECT_DOUBLE_EQ(e.worst_mean, 2e5);
  }
}

TEST(SolveNominal, TwoBarMatchesFullyStressedOracle) {
  const auto model = truss::TrussModel::load(test_paths::problem("two_bar.json"));
  // determinate truss: N = (P, P sqrt 2), A_j = |N_j| sum|N_i| L_i / (E pi_bar)
  const double p = 1e5, e = 2e4, pi_bar = 1e6;
  const double forces[2] = {p, p * std::sqrt(2.0)};
  const double lengths[2] = {1000, 1000 * std::sqrt(2.0)};
  const double work = forces[0] * lengths[0] + forces[1] * lengths[1];
  const auto t0 = std::chrono::steady_clock::now();
  const auto design = solve_nominal(model);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
  for (Index j = 0; j < 2; ++j) {
    const double oracle_mm2 = forces[j] * work / (e * pi_bar);
    EXPECT_NEAR(design.areas(j) * model.area_unit(), oracle_mm2, 1e-3 * oracle_mm2);
  }
  EXPECT_NEAR(design.areas(0) * 100, 1500, 1.5);
  EXPECT_NEAR(design.areas(1) * 100, 2121.3, 2.1);
  EXPECT_NEAR(design.volume, 4.5e6, 4.5e3);
  EXPECT_NEAR(design.compliance, 100, 0.1);
}

TEST(SolveNominal, DoublingBoundHalvesVolume) {
  for (const char* name : {"two_bar.json", "grid_29.json"}) {
    auto doc = truss::TrussModel::load(test_paths::problem(name)).to_json();
    doc["x_min"] = 1e-3;
    const auto base = solve_nominal(truss::TrussModel::from_json(doc));
    doc["pi_bar"] = 2 * doc["pi_bar"].get<double>();
    const auto doubled = solve_nominal(truss::TrussModel::from_json(doc));
    EXPECT_NEAR(doubled.volume, base.volume / 2, 1e-4 * base.volume) << name;
  }
}

TEST(SolveNominal, GridMatchesReferenceVolume) {
  const auto model = truss::TrussModel::load(test_paths::problem("grid_29.json"));
  const auto design = solve_nominal(model);
  EXPECT_NEAR(design.volume, 1.6616e7, 1e-3 * 1.6616e7);
  EXPECT_NEAR(design.compliance, model.compliance_bound(), 1e-4 * model.compliance_bound());
}

TEST(Sequential, TwoBarLinfMatchesReference) {
  const auto model = truss::TrussModel::load(test_paths::problem("two_bar.json"));
  const auto result = sequential_sdp(model, two_bar_uncertainty(NormKind::kLinf),
                                     {0.01, DistributionFamily::kGaussian});
  ASSERT_TRUE(result.converged());
  EXPECT_NEAR(result.design.volume / result.nominal.volume, 1.0387, 0.015 * 1.0387);
  EXPECT_NEAR(result.design.compliance, 96.274, 0.015 * 96.274);
  EXPECT_LE(result.design.margin->total(), 1e-6 * model.compliance_bound());
}

TEST(Sequential, TwoBarL2WithinLinf) {
  const auto model = truss::TrussModel::load(test_paths::problem("two_bar.json"));
  const ReliabilitySpec spec{0.01, DistributionFamily::kGaussian};
  const auto l2 = sequential_sdp(model, two_bar_uncertainty(NormKind::kL2), spec);
  const auto linf = sequential_sdp(model, two_bar_uncertainty(NormKind::kLinf), spec);
  ASSERT_TRUE(l2.converged());
  EXPECT_LE(l2.design.volume, linf.design.volume + 1e-6 * linf.design.volume);
  EXPECT_GT(l2.design.volume, l2.nominal.volume);
  EXPECT_NEAR(l2.design.volume / l2.nominal.volume, 1.0236, 0.015 * 1.0236);
  EXPECT_NEAR(l2.design.compliance, 97.692, 0.015 * 97.692);
  EXPECT_LE(l2.design.margin->total(), 1e-6 * model.compliance_bound());
}

TEST(Sequential, VanishingKappaRecoversNominal) {
  const auto model = truss::TrussModel::load(test_paths::problem("two_bar.json"));
  const auto result = sequential_sdp(model, two_bar_uncertainty(NormKind::kLinf, 0, 0),
                                     {0.5 - 1e-9, DistributionFamily::kGaussian});
  EXPECT_NEAR(result.design.volume, result.nominal.volume, 1e-3 * result.nominal.volume);
}

TEST(Sequential, LogRecordsEveryIterate) {
  const auto model = truss::TrussModel::load(test_paths::problem("two_bar.json"));
  SequentialSettings settings;
  settings.max_iterations = 2;
  const auto result = sequential_sdp(model, two_bar_uncertainty(NormKind::kLinf),
                                     {0.01, DistributionFamily::kAll}, settings);
  EXPECT_FALSE(result.converged());
  ASSERT_EQ(result.log.size(), 2u);
  EXPECT_EQ(result.log[1].iteration, 2);
  EXPECT_TRUE(result.log[1].areas.isApprox(result.design.areas));
}

TEST(UncertaintyConfig, JsonRoundTripAndDefaults) {
  const auto cfg = UncertaintyConfig::load(test_paths::problem("unc_two_bar_l2.json"));
  EXPECT_EQ(cfg.uncertainty.norm, NormKind::kL2);
  EXPECT_TRUE(cfg.uncertainty.A.isIdentity());
  EXPECT_DOUBLE_EQ(cfg.uncertainty.sigma_tilde(0, 1), 0.02);
  const auto back = UncertaintyConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  auto doc = cfg.to_json();
  doc["norm"] = "l1";
  EXPECT_THROW(UncertaintyConfig::from_json(doc), ConfigurationError);
  doc = cfg.to_json();
  doc["sigma_tilde"] = {1, 2, 2, 1};
  EXPECT_THROW(UncertaintyConfig::from_json(doc), ConfigurationError);
}

}  // namespace
}  // namespace drrbdo::robust
