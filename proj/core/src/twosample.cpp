#include "censwald/twosample.hpp"

#include <cmath>
#include <utility>

#include <Eigen/SVD>

#include "censwald/distributions.hpp"
#include "censwald/error.hpp"

namespace censwald {

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
}

void check_fits(const FitResult& f1, const FitResult& f2) {
  if (!f1.converged || !f2.converged) throw InvalidArgument("two-sample: both fits must have converged");
  if (f1.sigma_hat.size() == 0 || f2.sigma_hat.size() == 0)
    throw InvalidArgument("two-sample: fits carry no covariance estimate");
  if (f1.alpha != f2.alpha) throw InvalidArgument("two-sample: arms were fitted with different alpha");
  if (f1.family != f2.family) throw InvalidArgument("two-sample: arms were fitted with different families");
}

}  // namespace

const char* to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Greater:
      return "greater";
    case Direction::Less:
      return "less";
    case Direction::TwoSided:
      break;
  }
  return "two-sided";
}

TwoSampleRestriction TwoSampleRestriction::homogeneity(std::size_t p, std::string description) {
  if (p == 0) throw InvalidArgument("restriction: dimension must be positive");
  TwoSampleRestriction res;
  res.r = p;
  res.p = p;
  const auto pp = static_cast<Eigen::Index>(p);
  res.m = [](const Vec& a, const Vec& b) -> Vec { return a - b; };
  res.jacobian1 = [pp](const Vec&, const Vec&) -> Mat { return Mat::Identity(pp, pp); };
  res.jacobian2 = [pp](const Vec&, const Vec&) -> Mat { return -Mat::Identity(pp, pp); };
  res.description = std::move(description);
  return res;
}

TwoSampleRestriction TwoSampleRestriction::component_homogeneity(std::size_t p, std::size_t index,
                                                                 Direction direction, std::string description) {
  if (index >= p) throw InvalidArgument("restriction: component index out of range");
  TwoSampleRestriction res;
  res.r = 1;
  res.p = p;
  const auto k = static_cast<Eigen::Index>(index);
  const auto pp = static_cast<Eigen::Index>(p);
  res.m = [k](const Vec& a, const Vec& b) -> Vec { return Vec::Constant(1, a[k] - b[k]); };
  res.jacobian1 = [k, pp](const Vec&, const Vec&) -> Mat {
    Mat j = Mat::Zero(pp, 1);
    j(k, 0) = 1.0;
    return j;
  };
  res.jacobian2 = [k, pp](const Vec&, const Vec&) -> Mat {
    Mat j = Mat::Zero(pp, 1);
    j(k, 0) = -1.0;
    return j;
  };
  res.direction = direction;
  res.description = std::move(description);
  return res;
}

void TwoSampleRestriction::check_rank(const Vec& theta1, const Vec& theta2) const {
  if (static_cast<std::size_t>(theta1.size()) != p || static_cast<std::size_t>(theta2.size()) != p)
    throw InvalidArgument("restriction: parameter dimension mismatch");
  const Mat m1 = jacobian1(theta1, theta2);
  const Mat m2 = jacobian2(theta1, theta2);
  if (static_cast<std::size_t>(m1.rows()) != p || static_cast<std::size_t>(m1.cols()) != r ||
      m2.rows() != m1.rows() || m2.cols() != m1.cols())
    throw InvalidArgument("restriction: jacobian has wrong shape");
  Mat stacked(2 * m1.rows(), m1.cols());
  stacked << m1, m2;
  Eigen::JacobiSVD<Mat> svd(stacked);
  const Vec sv = svd.singularValues();
  if (sv.size() == 0 || sv[sv.size() - 1] <= 1e-10) throw InvalidArgument("restriction: [M1; M2] is rank deficient");
}

Mat pooled_sigma(const Mat& m1, const Mat& sigma1, double w1, const Mat& m2, const Mat& sigma2, double w2) {
  return symmetrize(w1 * m1.transpose() * sigma1 * m1 + w2 * m2.transpose() * sigma2 * m2);
}

Mat sigma_tilde(const TwoSampleRestriction& restriction, const Vec& theta1, const Mat& sigma1, std::size_t n1,
                const Vec& theta2, const Mat& sigma2, std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw InvalidArgument("two-sample: sample sizes must be positive");
  const double total = static_cast<double>(n1 + n2);
  return pooled_sigma(restriction.jacobian1(theta1, theta2), sigma1, static_cast<double>(n2) / total,
                      restriction.jacobian2(theta1, theta2), sigma2, static_cast<double>(n1) / total);
}

TwoSampleReport two_sample_wald(const Vec& theta1, const Mat& sigma1, std::size_t n1, const Vec& theta2,
                                const Mat& sigma2, std::size_t n2, const TwoSampleRestriction& restriction,
                                double level) {
  check_level(level);
  restriction.check_rank(theta1, theta2);
  TwoSampleReport rep;
  rep.sigma_tilde = sigma_tilde(restriction, theta1, sigma1, n1, theta2, sigma2, n2);
  const Mat inv = checked_inverse(rep.sigma_tilde, "pooled Sigma-tilde");
  rep.m_value = restriction.m(theta1, theta2);
  const double factor = static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n1 + n2);
  rep.statistic = std::max(0.0, factor * rep.m_value.dot(inv * rep.m_value));
  rep.df = restriction.r;
  rep.p_value = dist::chi2_sf(rep.statistic, static_cast<double>(rep.df));
  rep.level = level;
  rep.reject = rep.p_value < level;
  rep.n1 = n1;
  rep.n2 = n2;
  rep.theta1 = theta1;
  rep.theta2 = theta2;
  rep.description = restriction.description;
  return rep;
}

TwoSampleReport two_sample_wald(const FitResult& fit1, std::size_t n1, const FitResult& fit2, std::size_t n2,
                                const TwoSampleRestriction& restriction, double level) {
  check_fits(fit1, fit2);
  TwoSampleReport rep =
      two_sample_wald(fit1.theta_hat, fit1.sigma_hat, n1, fit2.theta_hat, fit2.sigma_hat, n2, restriction, level);
  rep.alpha_dpd = fit1.alpha;
  return rep;
}

TwoSampleReport one_sided_wald(const Vec& theta1, const Mat& sigma1, std::size_t n1, const Vec& theta2,
                               const Mat& sigma2, std::size_t n2, const TwoSampleRestriction& restriction,
                               double level) {
  if (restriction.r != 1) throw InvalidArgument("one-sided test needs a single restriction");
  TwoSampleReport rep = two_sample_wald(theta1, sigma1, n1, theta2, sigma2, n2, restriction, level);
  const double mv = rep.m_value[0];
  double sign = mv > 0.0 ? 1.0 : (mv < 0.0 ? -1.0 : 0.0);
  if (restriction.direction == Direction::Less) sign = -sign;
  rep.statistic = sign * std::sqrt(rep.statistic);
  rep.one_sided = true;
  rep.direction = restriction.direction == Direction::Less ? Direction::Less : Direction::Greater;
  rep.df = 1;
  rep.p_value = dist::normal_sf(rep.statistic);
  rep.reject = rep.statistic > dist::normal_quantile(1.0 - level);
  return rep;
}

TwoSampleReport one_sided_wald(const FitResult& fit1, std::size_t n1, const FitResult& fit2, std::size_t n2,
                               const TwoSampleRestriction& restriction, double level) {
  check_fits(fit1, fit2);
  TwoSampleReport rep =
      one_sided_wald(fit1.theta_hat, fit1.sigma_hat, n1, fit2.theta_hat, fit2.sigma_hat, n2, restriction, level);
  rep.alpha_dpd = fit1.alpha;
  return rep;
}

double two_sample_power_approx(const Vec& theta1, const Vec& theta2, const TwoSampleRestriction& restriction,
                               const Mat& sigma1, const Mat& sigma2, std::size_t n1, std::size_t n2,
                               double level) {
  check_level(level);
  restriction.check_rank(theta1, theta2);
  const Mat st = sigma_tilde(restriction, theta1, sigma1, n1, theta2, sigma2, n2);
  const Vec mv = restriction.m(theta1, theta2);
  const double l = mv.dot(checked_inverse(st, "pooled Sigma-tilde") * mv);
  if (!(l > 0.0)) throw InvalidArgument("power: the supplied point satisfies the null hypothesis");
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double q = dist::chi2_upper_quantile(level, static_cast<double>(restriction.r));
  const double z = std::sqrt((a + b) / (a * b)) / (2.0 * std::sqrt(l)) * (q - a * b / (a + b) * l);
  return dist::normal_sf(z);
}

double two_sample_ncp(const Vec& delta1, const Vec& delta2, const TwoSampleRestriction& restriction,
                      const Vec& theta10, const Vec& theta20, const Mat& sigma_limit, double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw InvalidArgument("omega must lie in (0, 1)");
  restriction.check_rank(theta10, theta20);
  const Vec w = std::sqrt(omega) * (restriction.jacobian1(theta10, theta20).transpose() * delta1) +
                std::sqrt(1.0 - omega) * (restriction.jacobian2(theta10, theta20).transpose() * delta2);
  return std::max(0.0, w.dot(checked_inverse(sigma_limit, "limiting Sigma-tilde") * w));
}

double two_sample_contiguous(const Vec& delta1, const Vec& delta2, const TwoSampleRestriction& restriction,
                             const Vec& theta10, const Vec& theta20, const Mat& sigma_limit, double omega,
                             double level) {
  check_level(level);
  const double ncp = two_sample_ncp(delta1, delta2, restriction, theta10, theta20, sigma_limit, omega);
  const double df = static_cast<double>(restriction.r);
  return dist::noncentral_chi2_sf(dist::chi2_upper_quantile(level, df), df, ncp);
}

}  // namespace censwald
