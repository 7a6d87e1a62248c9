#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "censwald/estimator.hpp"
#include "censwald/linalg.hpp"

namespace censwald {

/// A null hypothesis m(theta) = 0 with r restrictions on a p-dimensional parameter.
///
/// `jacobian` returns M(theta), p x r, whose columns are the gradients of the components of m.
struct Restriction {
  std::size_t r = 0;
  std::size_t p = 0;
  std::function<Vec(const Vec&)> m;
  std::function<Mat(const Vec&)> jacobian;
  std::string description;

  /// m(theta) = theta - theta0, M = I.
  static Restriction simple(const Vec& theta0, std::string description = {});
  /// m(theta) = theta[index] - value.
  static Restriction component(std::size_t p, std::size_t index, double value, std::string description = {});
  /// m(theta) = A theta - c with A r x p.
  static Restriction linear(const Mat& a, const Vec& c, std::string description = {});
  /// Arbitrary m; M by central differences with step 1e-6 (1 + |theta_j|).
  static Restriction from_function(std::size_t p, std::size_t r, std::function<Vec(const Vec&)> m,
                                   std::string description = {});

  /// Throws InvalidArgument unless M(theta) is p x r with smallest singular value above 1e-10.
  void check_rank(const Vec& theta) const;
};

/// Central-difference Jacobian of m, p x r (used to validate analytic jacobians).
Mat numerical_jacobian(const std::function<Vec(const Vec&)>& m, const Vec& theta, double step = 1e-6);

struct TestReport {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  double level = 0.05;
  bool reject = false;
  double alpha_dpd = 0.0;
  std::size_t n = 0;
  std::string description;
  Vec m_value;
  double inner_condition = 0.0;
  double lambda_condition = 0.0;
  bool heavy_tail = false;
};

/// W = n m^T [M^T Sigma M]^{-1} m with everything evaluated at theta_hat; p-value from chi2_r.
TestReport wald_statistic(const Vec& theta_hat, const Mat& sigma, std::size_t n, const Restriction& restriction,
                          double level = 0.05);
/// Same on a converged fit (uses its sigma_hat). Throws InvalidArgument for unconverged fits.
TestReport wald_statistic(const FitResult& fit, const Restriction& restriction, double level = 0.05);

/// W-bar(theta) = m^T [M^T Sigma M]^{-1} m for a fixed Sigma.
double w_bar(const Vec& theta, const Restriction& restriction, const Mat& sigma);

/// 1 - Phi( sqrt(n) / sigma_* (chi2_{r,level} / n - W-bar(theta_star)) ), where
/// sigma_*^2 = grad W-bar^T Sigma grad W-bar by central differences with Sigma held fixed.
/// Throws InvalidArgument when theta_star satisfies the null.
double power_approx(const Vec& theta_star, const Restriction& restriction, const Mat& sigma, std::size_t n,
                    double level = 0.05);

/// Noncentrality d^T M (M^T Sigma M)^{-1} M^T d with M evaluated at theta0.
double contiguous_ncp(const Vec& d, const Restriction& restriction, const Mat& sigma, const Vec& theta0);

/// P(chi2_r(ncp) > chi2_{r,level}) under theta_n = theta0 + d / sqrt(n).
double contiguous_power(const Vec& d, const Restriction& restriction, const Mat& sigma, const Vec& theta0,
                        double level = 0.05);

}  // namespace censwald
