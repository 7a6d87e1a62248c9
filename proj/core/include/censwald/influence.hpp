#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "censwald/distributions.hpp"
#include "censwald/hypothesis.hpp"
#include "censwald/linalg.hpp"
#include "censwald/model.hpp"
#include "censwald/twosample.hpp"

namespace censwald {

/// IF(t) = Lambda(psi_a; theta0)^{-1} psi_a(t; theta0) of the MDPDE at the model.
Vec if_estimator(const Family& fam, const Vec& theta0, double alpha, double t);
/// Same for a general psi with a supplied Lambda.
Vec if_estimator(const PsiFunction& psi, const Mat& lambda, const Vec& theta0, double t);

/// Asymptotic covariance of the MDPDE for uncensored data:
/// K_a^{-1} (K_{2a} - J_a J_a^T) K_a^{-1}.
Mat sigma_model(const Family& fam, const Vec& theta, double alpha);

struct IfCurve {
  std::string kind;  // "estimator", "if2", "pif"
  FamilyId family = FamilyId::Exponential;
  Vec theta0;
  double alpha = 0.0;
  std::vector<double> t;
  /// One row per grid point.
  Mat values;
  std::vector<std::string> columns;
};

IfCurve if_curve(const Family& fam, const Vec& theta0, double alpha, std::span<const double> grid);
void write_if_curve_csv(const IfCurve& curve, const std::filesystem::path& path);

/// 2 IF^T M (M^T Sigma M)^{-1} M^T IF at theta0. Throws InvalidArgument when m(theta0) != 0.
double if2_wald(const Family& fam, const Vec& theta0, double alpha, const Restriction& restriction,
                const Mat& sigma, double t);

using dist::noncentral_weights;

/// K*_r(s) = e^{-s/2} sum_v s^{v-1} 2^{-v} (2v - s) P(chi2_{r+2v} > q) / v!, evaluated as
/// sum_v C_v(s) [P(chi2_{r+2v+2} > q) - P(chi2_{r+2v} > q)], which is finite for all s >= 0.
double k_star(std::size_t r, double s, double level);

/// Asymptotic power under contiguous contamination: sum_v C_v(s_eps) P(chi2_{r+2v} > q) with
/// s_eps = (d + eps IF)^T M Sigma*^{-1} M^T (d + eps IF).
double contaminated_power(const Vec& d, const Vec& influence, double eps, const Restriction& restriction,
                          const Mat& sigma, const Vec& theta0, double level);

/// PIF(t) = K*_r(S0 d) S0 IF(t), S0 = d^T M Sigma*^{-1} M^T. Throws InvalidArgument for d = 0.
double pif(const Family& fam, const Vec& theta0, double alpha, const Restriction& restriction, const Mat& sigma,
           const Vec& d, double t, double level = 0.05);

/// The level influence function, identically zero whenever IF(t) is finite.
double lif(const Family& fam, const Vec& theta0, double alpha, const Restriction& restriction, const Mat& sigma,
           double t, double level = 0.05);

/// Second-order IF of the two-sample functional at the null point (theta10, theta20):
/// 2 Q^T Sigma_psi^{-1} Q, Q = M1^T IF1(t1) + M2^T IF2(t2), Sigma_psi = sum_i omega_i M_i^T Sigma_i M_i
/// with omega_1 = omega. A missing t drops that arm's term (single-arm contamination).
double if2_two_sample(const Family& fam, const Vec& theta10, const Vec& theta20, double alpha,
                      const TwoSampleRestriction& restriction, const Mat& sigma1, const Mat& sigma2, double omega,
                      std::optional<double> t1, std::optional<double> t2);

}  // namespace censwald
