#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "censwald/data.hpp"
#include "censwald/linalg.hpp"
#include "censwald/psi.hpp"

namespace censwald {

/// Plug-in estimates of gamma_0, gamma, gamma_1, gamma_2 at the ordered observations.
///
/// gamma0[i] = exp( sum_{j<i} I(delta_j = 0) / (n - j) )
/// gamma[i]  = sum_{j<i} n I(delta_j = 0) / (n - j)^2
/// (1-based j in the formulas; vectors here are 0-based). gamma_1 and gamma_2 take phi
/// evaluated at the ordered observations and are built from one prefix and one suffix sum.
class GammaTables {
 public:
  explicit GammaTables(const CensoredSample& sample);

  std::size_t size() const noexcept { return delta_.size(); }
  std::span<const double> gamma0() const noexcept { return gamma0_; }
  std::span<const double> gamma() const noexcept { return gamma_; }

  std::vector<double> gamma1(std::span<const double> phi) const;
  std::vector<double> gamma2(std::span<const double> phi) const;

  /// U-hat(Z_(i), delta_[i]; phi) = phi gamma0 delta + gamma1 (1 - delta) - gamma2.
  std::vector<double> u_hat(std::span<const double> phi) const;

 private:
  std::vector<int> delta_;
  std::vector<double> gamma0_;
  std::vector<double> gamma_;
};

GammaTables gamma_tables(const CensoredSample& sample);

/// U-hat vectors, one row per ordered observation (n x p).
Mat u_hat(const CensoredSample& sample, const PsiFunction& psi, const Vec& theta);

/// C-hat = (1/n) sum_i U_i U_i^T.
Mat c_hat(const CensoredSample& sample, const PsiFunction& psi, const Vec& theta);
Mat c_hat_from_u(const Mat& u);

/// Sandwich Lambda^{-1} C Lambda^{-T}, symmetrized. Throws NumericalError for singular Lambda.
Mat sigma_hat(const Mat& lambda, const Mat& c);

/// KMPL-weighted empirical Lambda-hat = int d/dtheta psi(x; theta) dG_X-hat(x), by central
/// differences with step 1e-5 (1 + |theta_j|). Entry (k, j) is d psi_k / d theta_j.
Mat lambda_empirical(const CensoredSample& sample, const PsiFunction& psi, const Vec& theta);

enum class LambdaKind { Model, Empirical };

struct CovarianceEstimate {
  Mat c_hat;
  Mat lambda_hat;
  Mat sigma_hat;
  double lambda_condition = 0.0;
};

/// Full estimate for a general psi with a caller-supplied Lambda.
CovarianceEstimate estimate_covariance(const CensoredSample& sample, const PsiFunction& psi, const Vec& theta,
                                       const Mat& lambda);

/// MDPDE estimate at theta-hat; Lambda from the model (default) or the empirical plug-in.
CovarianceEstimate estimate_covariance(const CensoredSample& sample, const Family& fam, const Vec& theta,
                                       double alpha, LambdaKind kind = LambdaKind::Model);

}  // namespace censwald
