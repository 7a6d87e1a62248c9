#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "censwald/estimator.hpp"
#include "censwald/linalg.hpp"

namespace censwald {

enum class Direction { TwoSided, Greater, Less };
const char* to_string(Direction d) noexcept;

/// Null hypothesis m(theta1, theta2) = 0 across two arms. M1 and M2 are p x r.
struct TwoSampleRestriction {
  std::size_t r = 0;
  std::size_t p = 0;
  std::function<Vec(const Vec&, const Vec&)> m;
  std::function<Mat(const Vec&, const Vec&)> jacobian1;
  std::function<Mat(const Vec&, const Vec&)> jacobian2;
  /// Greater: the alternative is m > 0. Only meaningful for r = 1.
  Direction direction = Direction::TwoSided;
  std::string description;

  /// m = theta1 - theta2.
  static TwoSampleRestriction homogeneity(std::size_t p, std::string description = {});
  /// m = theta1[index] - theta2[index].
  static TwoSampleRestriction component_homogeneity(std::size_t p, std::size_t index,
                                                    Direction direction = Direction::TwoSided,
                                                    std::string description = {});

  /// Throws InvalidArgument unless [M1; M2] has rank r at (theta1, theta2).
  void check_rank(const Vec& theta1, const Vec& theta2) const;
};

struct TwoSampleReport {
  double statistic = 0.0;
  std::size_t df = 0;
  bool one_sided = false;
  Direction direction = Direction::TwoSided;
  double p_value = 1.0;
  double level = 0.05;
  bool reject = false;
  double alpha_dpd = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  Vec theta1;
  Vec theta2;
  Vec m_value;
  Mat sigma_tilde;
  std::string description;
};

/// sum_i w_i M_i^T Sigma_i M_i.
Mat pooled_sigma(const Mat& m1, const Mat& sigma1, double w1, const Mat& m2, const Mat& sigma2, double w2);

/// Finite-sample pooled matrix with weights (N - n_i) / N.
Mat sigma_tilde(const TwoSampleRestriction& restriction, const Vec& theta1, const Mat& sigma1, std::size_t n1,
                const Vec& theta2, const Mat& sigma2, std::size_t n2);

/// (n1 n2 / N) m^T Sigma-tilde^{-1} m; p-value from chi2_r.
TwoSampleReport two_sample_wald(const Vec& theta1, const Mat& sigma1, std::size_t n1, const Vec& theta2,
                                const Mat& sigma2, std::size_t n2, const TwoSampleRestriction& restriction,
                                double level = 0.05);
/// Requires both fits converged with the same alpha.
TwoSampleReport two_sample_wald(const FitResult& fit1, std::size_t n1, const FitResult& fit2, std::size_t n2,
                                const TwoSampleRestriction& restriction, double level = 0.05);

/// sign(m) sqrt(W) for r = 1, sign flipped for Direction::Less; p = 1 - Phi(statistic).
TwoSampleReport one_sided_wald(const Vec& theta1, const Mat& sigma1, std::size_t n1, const Vec& theta2,
                               const Mat& sigma2, std::size_t n2, const TwoSampleRestriction& restriction,
                               double level = 0.05);
TwoSampleReport one_sided_wald(const FitResult& fit1, std::size_t n1, const FitResult& fit2, std::size_t n2,
                               const TwoSampleRestriction& restriction, double level = 0.05);

/// Normal approximation to the power at a fixed alternative, with l* = m^T Sigma-tilde^{-1} m.
double two_sample_power_approx(const Vec& theta1, const Vec& theta2, const TwoSampleRestriction& restriction,
                               const Mat& sigma1, const Mat& sigma2, std::size_t n1, std::size_t n2,
                               double level = 0.05);

/// ncp = W^T Sigma_limit^{-1} W with W = sqrt(omega) M1^T Delta1 + sqrt(1 - omega) M2^T Delta2,
/// jacobians evaluated at the null point (theta10, theta20).
double two_sample_ncp(const Vec& delta1, const Vec& delta2, const TwoSampleRestriction& restriction,
                      const Vec& theta10, const Vec& theta20, const Mat& sigma_limit, double omega);
double two_sample_contiguous(const Vec& delta1, const Vec& delta2, const TwoSampleRestriction& restriction,
                             const Vec& theta10, const Vec& theta20, const Mat& sigma_limit, double omega,
                             double level = 0.05);

}  // namespace censwald
