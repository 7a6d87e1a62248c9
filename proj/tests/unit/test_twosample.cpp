#include <gtest/gtest.h>

#include "censwald/distributions.hpp"
#include "censwald/twosample.hpp"
#include "support.hpp"

using namespace censwald;
using fixtures::vec;

namespace {
const Mat kS1 = (Mat(2, 2) << 0.8, 0.3, 0.3, 2.5).finished();
const Mat kS2 = (Mat(2, 2) << 1.2, -0.1, -0.1, 1.5).finished();
}

TEST(TwoSample, HomogeneityStatistic) {
  const Vec t1 = vec({2.1, 4.6}), t2 = vec({1.9, 5.3});
  const auto r = TwoSampleRestriction::homogeneity(2);
  const TwoSampleReport rep = two_sample_wald(t1, kS1, 60, t2, kS2, 90, r);
  const double N = 150.0;
  const Mat st = (90.0 / N) * kS1 + (60.0 / N) * kS2;
  const Vec m = t1 - t2;
  const double want = 60.0 * 90.0 / N * m.dot(st.inverse() * m);
  EXPECT_NEAR(rep.statistic, want, 1e-12 * want);
  EXPECT_EQ(rep.df, 2u);
  EXPECT_LT((rep.sigma_tilde - st).norm(), 1e-14);
}

TEST(TwoSample, SwappingArmsPreservesTwoSidedAndFlipsOneSided) {
  const Vec t1 = vec({2.1, 4.6}), t2 = vec({1.9, 5.3});
  const auto r = TwoSampleRestriction::component_homogeneity(2, 1, Direction::Greater);
  const auto a = two_sample_wald(t1, kS1, 60, t2, kS2, 90, r);
  const auto b = two_sample_wald(t2, kS2, 90, t1, kS1, 60, r);
  EXPECT_NEAR(a.statistic, b.statistic, 1e-12);
  const auto oa = one_sided_wald(t1, kS1, 60, t2, kS2, 90, r);
  const auto ob = one_sided_wald(t2, kS2, 90, t1, kS1, 60, r);
  EXPECT_NEAR(oa.statistic, -ob.statistic, 1e-12);
  EXPECT_NEAR(oa.p_value + ob.p_value, 1.0, 1e-12);
}

TEST(TwoSample, OneSidedCoherentWithTwoSided) {
  const Vec t1 = vec({2.1, 5.6}), t2 = vec({1.9, 5.0});
  for (Direction d : {Direction::Greater, Direction::Less}) {
    const auto r = TwoSampleRestriction::component_homogeneity(2, 1, d);
    const auto two = two_sample_wald(t1, kS1, 60, t2, kS2, 90, r);
    const auto one = one_sided_wald(t1, kS1, 60, t2, kS2, 90, r);
    EXPECT_NEAR(one.statistic * one.statistic, two.statistic, 1e-12);
    if (d == Direction::Greater) {
      EXPECT_GT(one.statistic, 0);
      EXPECT_NEAR(one.p_value, two.p_value / 2, 1e-12);
    } else {
      EXPECT_NEAR(one.p_value, 1 - two.p_value / 2, 1e-12);
    }
    EXPECT_EQ(one.reject, one.statistic > dist::normal_quantile(0.95));
  }
  EXPECT_THROW(one_sided_wald(t1, kS1, 60, t2, kS2, 90, TwoSampleRestriction::homogeneity(2)), InvalidArgument);
}

TEST(TwoSample, FitChecks) {
  FitResult f1, f2;
  f1.theta_hat = f2.theta_hat = vec({1.0, 1.0});
  f1.sigma_hat = f2.sigma_hat = kS1;
  f1.converged = f2.converged = true;
  f1.family = f2.family = FamilyId::Weibull;
  f1.alpha = 0.5;
  f2.alpha = 0.3;
  const auto r = TwoSampleRestriction::homogeneity(2);
  EXPECT_THROW(two_sample_wald(f1, 10, f2, 10, r), InvalidArgument);
  f2.alpha = 0.5;
  EXPECT_NEAR(two_sample_wald(f1, 10, f2, 10, r).statistic, 0.0, 1e-15);
  f2.converged = false;
  EXPECT_THROW(two_sample_wald(f1, 10, f2, 10, r), InvalidArgument);
}

TEST(TwoSample, ContiguousAndApproxPower) {
  const auto r = TwoSampleRestriction::homogeneity(2);
  const Vec t0 = vec({2.0, 5.0});
  const double omega = 0.4;
  const Mat lim = pooled_sigma(Mat::Identity(2, 2), kS1, omega, -Mat::Identity(2, 2), kS2, 1 - omega);
  EXPECT_NEAR(two_sample_contiguous(vec({0, 0}), vec({0, 0}), r, t0, t0, lim, omega), 0.05, 1e-12);
  const Vec d1 = vec({0.3, 0.0}), d2 = vec({-0.2, 0.4});
  const Vec w = std::sqrt(omega) * d1 - std::sqrt(1 - omega) * d2;
  EXPECT_NEAR(two_sample_ncp(d1, d2, r, t0, t0, lim, omega), w.dot(lim.inverse() * w), 1e-12);
  const double p1 = two_sample_power_approx(vec({2.1, 5.0}), t0, r, kS1, kS2, 50, 50);
  const double p2 = two_sample_power_approx(vec({2.1, 5.0}), t0, r, kS1, kS2, 800, 800);
  EXPECT_GT(p2, p1);
}
