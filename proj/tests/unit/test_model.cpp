#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "censwald/distributions.hpp"
#include "censwald/model.hpp"
#include "censwald/quadrature.hpp"
#include "support.hpp"

using namespace censwald;
using fixtures::vec;

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  std::vector<double> x(10), w(10);
  quad::gauss_legendre(10, x, w);
  double s = 0.0;
  for (std::size_t i = 0; i < 10; ++i) s += w[i] * std::pow(x[i], 18);
  EXPECT_NEAR(s, 2.0 / 19.0, 1e-15);
}

TEST(Quadrature, HalfLineAndTolerance) {
  const auto v = quad::integrate_half_line<2>([](double x) {
    return std::array<double, 2>{std::exp(-x), x * x * std::exp(-x)};
  }, {1e-13, 1e-13, 40});
  EXPECT_NEAR(v[0], 1.0, 1e-12);
  EXPECT_NEAR(v[1], 2.0, 1e-12);
  EXPECT_NEAR(quad::integrate_scalar([](double x) { return std::sin(x); }, 0.0, M_PI), 2.0, 1e-12);
}

TEST(Distributions, KnownValues) {
  EXPECT_NEAR(dist::chi2_sf(3.841458820694124, 1), 0.05, 1e-14);
  EXPECT_NEAR(dist::chi2_upper_quantile(0.05, 2), 5.991464547107979, 1e-12);
  EXPECT_NEAR(dist::normal_quantile(0.975), 1.959963984540054, 1e-14);
  EXPECT_NEAR(dist::normal_sf(1.959963984540054), 0.025, 1e-15);
}

TEST(Model, ScoreMatchesFiniteDifference) {
  for (const Family* fam : {&exponential_family(), &weibull_family()}) {
    const Vec theta = fam->dimension() == 1 ? vec({1.7}) : vec({2.0, 1.6});
    for (double x : {0.05, 0.7, 2.0, 6.5}) {
      const Vec u = fam->score(x, theta);
      for (Eigen::Index j = 0; j < theta.size(); ++j) {
        const double h = 1e-6 * theta[j];
        Vec tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        const double fd = (fam->log_density(x, tp) - fam->log_density(x, tm)) / (2 * h);
        EXPECT_NEAR(u[j], fd, 1e-7 * (1 + std::fabs(fd))) << fam->name() << " x=" << x << " j=" << j;
      }
    }
  }
}

TEST(Model, DensityCdfQuantile) {
  const Family& w = weibull_family();
  const Vec th = vec({2.0, 5.0});
  for (double p : {0.01, 0.3, 0.9}) EXPECT_NEAR(w.cdf(w.quantile(p, th), th), p, 1e-14);
  const double total = quad::integrate_scalar([&](double x) { return w.density(x, th); }, 0.0, 10.0);
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_THROW(w.validate(vec({-1.0, 1.0})), InvalidArgument);
  EXPECT_THROW(exponential_family().validate(vec({1.0, 1.0})), InvalidArgument);
  EXPECT_EQ(family_by_name("Weibull").id(), FamilyId::Weibull);
  EXPECT_EQ(family_by_name("exp").id(), FamilyId::Exponential);
  EXPECT_THROW(family_by_name("gamma"), InvalidArgument);
}

TEST(Model, ExponentialClosedFormsAgainstQuadrature) {
  const Family& e = exponential_family();
  for (double theta : {0.3, 1.0, 4.0})
    for (double a : {0.0, 0.25, 1.0}) {
      const auto closed = e.weighted_integrals(vec({theta}), a);
      const auto q = weighted_integrals_quadrature(e, vec({theta}), a, {1e-14, 1e-13, 40});
      EXPECT_NEAR(closed.xi, fixtures::exp_xi(theta, a), 1e-12 * closed.xi);
      EXPECT_NEAR(closed.j[0], fixtures::exp_j(theta, a), 1e-12);
      EXPECT_NEAR(closed.k(0, 0), fixtures::exp_k(theta, a), 1e-12 * closed.k(0, 0));
      EXPECT_NEAR(q.xi, closed.xi, 1e-10 * closed.xi);
      EXPECT_NEAR(q.j[0], closed.j[0], 1e-10 * (1 + std::fabs(closed.j[0])));
      EXPECT_NEAR(q.k(0, 0), closed.k(0, 0), 1e-10 * closed.k(0, 0));
    }
}

TEST(Model, WeibullXiGammaFunctionOracle) {
  const Family& w = weibull_family();
  for (double sigma : {0.5, 2.0, 120.0})
    for (double b : {0.7, 1.0, 5.0})
      for (double a : {0.1, 0.5, 1.0}) {
        const double e = a * (b - 1) / b;
        const double oracle = std::pow(b / sigma, a) * boost::math::tgamma(e + 1) / std::pow(1 + a, e + 1);
        const auto wi = w.weighted_integrals(vec({sigma, b}), a);
        EXPECT_NEAR(wi.xi, oracle, 1e-9 * oracle) << sigma << ' ' << b << ' ' << a;
      }
}

TEST(Model, WeibullAlphaZeroIsFisherInformation) {
  // At alpha = 0, J = E[u] = 0 and K is the Fisher information.
  const double sigma = 2.0, b = 5.0;
  const auto wi = weibull_family().weighted_integrals(vec({sigma, b}), 0.0);
  const double g = 0.42278433509846713;  // 1 - Euler gamma
  EXPECT_NEAR(wi.xi, 1.0, 1e-10);
  EXPECT_NEAR(wi.j.norm(), 0.0, 1e-10);
  EXPECT_NEAR(wi.k(0, 0), b * b / (sigma * sigma), 1e-9);
  EXPECT_NEAR(wi.k(1, 1), (std::pow(g, 2) + M_PI * M_PI / 6) / (b * b), 1e-9);
  EXPECT_NEAR(wi.k(0, 1), -g / sigma, 1e-9);
}

TEST(Model, PsiHasZeroModelMean) {
  const Family& w = weibull_family();
  const Vec th = vec({1.5, 2.5});
  const double a = 0.4;
  const auto r = quad::integrate_half_line<2>([&](double x) {
    if (x <= 0) return std::array<double, 2>{0, 0};
    const Vec p = mdpde_psi(w, th, a, x) * w.density(x, th);
    return std::array<double, 2>{p[0], p[1]};
  }, {1e-12, 1e-12, 40});
  EXPECT_NEAR(r[0], 0.0, 1e-8);
  EXPECT_NEAR(r[1], 0.0, 1e-8);
  EXPECT_THROW(check_alpha(-0.1), InvalidArgument);
}

TEST(Model, LambdaIsK) {
  const auto wi = weibull_family().weighted_integrals(vec({2.0, 5.0}), 0.5);
  EXPECT_LT((lambda_model(weibull_family(), vec({2.0, 5.0}), 0.5) - wi.k).norm(), 1e-12);
}
