#include "censwald/hypothesis.hpp"

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

Mat inner_matrix(const Mat& mj, const Mat& sigma) { return symmetrize(mj.transpose() * sigma * mj); }

}  // namespace

Mat numerical_jacobian(const std::function<Vec(const Vec&)>& m, const Vec& theta, double step) {
  const Vec m0 = m(theta);
  Mat out(theta.size(), m0.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = step * (1.0 + std::fabs(theta[j]));
    Vec up = theta;
    Vec down = theta;
    up[j] += h;
    down[j] -= h;
    out.row(j) = ((m(up) - m(down)) / (2.0 * h)).transpose();
  }
  return out;
}

Restriction Restriction::simple(const Vec& theta0, std::string description) {
  Restriction res;
  res.r = static_cast<std::size_t>(theta0.size());
  res.p = res.r;
  res.m = [theta0](const Vec& t) -> Vec { return t - theta0; };
  const auto p = theta0.size();
  res.jacobian = [p](const Vec&) -> Mat { return Mat::Identity(p, p); };
  res.description = std::move(description);
  return res;
}

Restriction Restriction::component(std::size_t p, std::size_t index, double value, std::string description) {
  if (index >= p) throw InvalidArgument("restriction: component index out of range");
  Mat a = Mat::Zero(1, static_cast<Eigen::Index>(p));
  a(0, static_cast<Eigen::Index>(index)) = 1.0;
  return linear(a, Vec::Constant(1, value), std::move(description));
}

Restriction Restriction::linear(const Mat& a, const Vec& c, std::string description) {
  if (a.rows() != c.size() || a.rows() == 0) throw InvalidArgument("restriction: A and c sizes disagree");
  Restriction res;
  res.r = static_cast<std::size_t>(a.rows());
  res.p = static_cast<std::size_t>(a.cols());
  res.m = [a, c](const Vec& t) -> Vec { return a * t - c; };
  const Mat at = a.transpose();
  res.jacobian = [at](const Vec&) -> Mat { return at; };
  res.description = std::move(description);
  return res;
}

Restriction Restriction::from_function(std::size_t p, std::size_t r, std::function<Vec(const Vec&)> m,
                                       std::string description) {
  Restriction res;
  res.r = r;
  res.p = p;
  res.m = m;
  res.jacobian = [m](const Vec& t) -> Mat { return numerical_jacobian(m, t); };
  res.description = std::move(description);
  return res;
}

void Restriction::check_rank(const Vec& theta) const {
  if (static_cast<std::size_t>(theta.size()) != p) throw InvalidArgument("restriction: parameter dimension mismatch");
  const Mat mj = jacobian(theta);
  if (static_cast<std::size_t>(mj.rows()) != p || static_cast<std::size_t>(mj.cols()) != r)
    throw InvalidArgument("restriction: jacobian has wrong shape");
  Eigen::JacobiSVD<Mat> svd(mj);
  const Vec sv = svd.singularValues();
  if (sv.size() == 0 || sv[sv.size() - 1] <= 1e-10) throw InvalidArgument("restriction: M(theta) is rank deficient");
}

TestReport wald_statistic(const Vec& theta_hat, const Mat& sigma, std::size_t n, const Restriction& restriction,
                          double level) {
  check_level(level);
  if (n == 0) throw InvalidArgument("wald: n must be positive");
  if (sigma.rows() != theta_hat.size() || sigma.cols() != theta_hat.size())
    throw InvalidArgument("wald: sigma has wrong shape");
  restriction.check_rank(theta_hat);
  const Vec mv = restriction.m(theta_hat);
  const Mat inner = inner_matrix(restriction.jacobian(theta_hat), sigma);
  TestReport rep;
  rep.inner_condition = condition_number(inner);
  const Mat inv = checked_inverse(inner, "M^T Sigma M");
  rep.statistic = std::max(0.0, static_cast<double>(n) * mv.dot(inv * mv));
  rep.df = restriction.r;
  rep.p_value = dist::chi2_sf(rep.statistic, static_cast<double>(rep.df));
  rep.level = level;
  rep.reject = rep.p_value < level;
  rep.n = n;
  rep.description = restriction.description;
  rep.m_value = mv;
  return rep;
}

TestReport wald_statistic(const FitResult& fit, const Restriction& restriction, double level) {
  if (!fit.converged) throw InvalidArgument("wald: fit did not converge");
  if (fit.sigma_hat.size() == 0) throw InvalidArgument("wald: fit carries no covariance estimate");
  TestReport rep = wald_statistic(fit.theta_hat, fit.sigma_hat, fit.n, restriction, level);
  rep.alpha_dpd = fit.alpha;
  rep.lambda_condition = fit.lambda_condition;
  rep.heavy_tail = fit.residual_mass > 0.05;
  return rep;
}

double w_bar(const Vec& theta, const Restriction& restriction, const Mat& sigma) {
  const Vec mv = restriction.m(theta);
  const Mat inv = checked_inverse(inner_matrix(restriction.jacobian(theta), sigma), "M^T Sigma M");
  return mv.dot(inv * mv);
}

double power_approx(const Vec& theta_star, const Restriction& restriction, const Mat& sigma, std::size_t n,
                    double level) {
  check_level(level);
  if (n == 0) throw InvalidArgument("power: n must be positive");
  restriction.check_rank(theta_star);
  const double w = w_bar(theta_star, restriction, sigma);
  if (!(w > 0.0)) throw InvalidArgument("power: theta_star satisfies the null hypothesis");
  Vec grad(theta_star.size());
  for (Eigen::Index j = 0; j < theta_star.size(); ++j) {
    const double h = 1e-5 * (1.0 + std::fabs(theta_star[j]));
    Vec up = theta_star;
    Vec down = theta_star;
    up[j] += h;
    down[j] -= h;
    grad[j] = (w_bar(up, restriction, sigma) - w_bar(down, restriction, sigma)) / (2.0 * h);
  }
  const double s2 = grad.dot(sigma * grad);
  if (!(s2 > 0.0)) throw NumericalError("power: sigma_*^2 is not positive");
  const double nd = static_cast<double>(n);
  const double q = dist::chi2_upper_quantile(level, static_cast<double>(restriction.r));
  return dist::normal_sf(std::sqrt(nd / s2) * (q / nd - w));
}

double contiguous_ncp(const Vec& d, const Restriction& restriction, const Mat& sigma, const Vec& theta0) {
  restriction.check_rank(theta0);
  if (d.size() != theta0.size()) throw InvalidArgument("contiguous: d has wrong dimension");
  if (!is_psd(sigma)) throw InvalidArgument("contiguous: sigma is not positive semidefinite");
  const Mat mj = restriction.jacobian(theta0);
  const Vec md = mj.transpose() * d;
  const Mat inv = checked_inverse(inner_matrix(mj, sigma), "M^T Sigma M");
  return std::max(0.0, md.dot(inv * md));
}

double contiguous_power(const Vec& d, const Restriction& restriction, const Mat& sigma, const Vec& theta0,
                        double level) {
  check_level(level);
  const double ncp = contiguous_ncp(d, restriction, sigma, theta0);
  const double df = static_cast<double>(restriction.r);
  return dist::noncentral_chi2_sf(dist::chi2_upper_quantile(level, df), df, ncp);
}

}  // namespace censwald
