#include "censwald/varest.hpp"

#include <cmath>

#include "censwald/error.hpp"
#include "censwald/kmpl.hpp"

namespace censwald {

GammaTables::GammaTables(const CensoredSample& sample) {
  const std::size_t n = sample.size();
  const double nd = static_cast<double>(n);
  delta_.resize(n);
  gamma0_.resize(n);
  gamma_.resize(n);
  double log_g0 = 0.0;
  double g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    delta_[i] = sample[i].delta;
    gamma0_[i] = std::exp(log_g0);
    gamma_[i] = g;
    if (delta_[i] == 0 && i + 1 < n) {
      const double rem = nd - static_cast<double>(i + 1);  // n - j with 1-based j = i + 1
      log_g0 += 1.0 / rem;
      g += nd / (rem * rem);
    }
  }
}

GammaTables gamma_tables(const CensoredSample& sample) { return GammaTables(sample); }

std::vector<double> GammaTables::gamma1(std::span<const double> phi) const {
  const std::size_t n = size();
  if (phi.size() != n) throw InvalidArgument("gamma1: phi has wrong length");
  std::vector<double> out(n, 0.0);
  double suffix = 0.0;  // sum_{j > i} delta_j phi_j gamma0_j
  for (std::size_t k = n; k-- > 0;) {
    out[k] = suffix / static_cast<double>(n - k);
    if (delta_[k] == 1) suffix += phi[k] * gamma0_[k];
  }
  return out;
}

std::vector<double> GammaTables::gamma2(std::span<const double> phi) const {
  const std::size_t n = size();
  if (phi.size() != n) throw InvalidArgument("gamma2: phi has wrong length");
  std::vector<double> suffix(n, 0.0);
  double acc = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    suffix[k] = acc;
    if (delta_[k] == 1) acc += phi[k] * gamma0_[k];
  }
  std::vector<double> out(n, 0.0);
  double prefix = 0.0;  // sum_{j <= i} delta_j gamma_j phi_j gamma0_j
  for (std::size_t k = 0; k < n; ++k) {
    if (delta_[k] == 1) prefix += gamma_[k] * phi[k] * gamma0_[k];
    out[k] = (prefix + gamma_[k] * suffix[k]) / static_cast<double>(n);
  }
  return out;
}

std::vector<double> GammaTables::u_hat(std::span<const double> phi) const {
  const auto g1 = gamma1(phi);
  const auto g2 = gamma2(phi);
  std::vector<double> out(size());
  for (std::size_t k = 0; k < size(); ++k) {
    if (!std::isfinite(phi[k])) throw NumericalError("U-hat: psi is not finite at an observation");
    out[k] = (delta_[k] == 1 ? phi[k] * gamma0_[k] : g1[k]) - g2[k];
  }
  return out;
}

Mat u_hat(const CensoredSample& sample, const PsiFunction& psi, const Vec& theta) {
  const GammaTables tables(sample);
  const Mat values = psi.evaluate(sample.times(), theta);
  Mat out(values.rows(), values.cols());
  std::vector<double> column(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    for (Eigen::Index r = 0; r < values.rows(); ++r) column[static_cast<std::size_t>(r)] = values(r, c);
    const auto u = tables.u_hat(column);
    for (Eigen::Index r = 0; r < values.rows(); ++r) out(r, c) = u[static_cast<std::size_t>(r)];
  }
  return out;
}

Mat c_hat_from_u(const Mat& u) {
  if (u.rows() == 0) throw InvalidArgument("c_hat: empty U matrix");
  return symmetrize(u.transpose() * u / static_cast<double>(u.rows()));
}

Mat c_hat(const CensoredSample& sample, const PsiFunction& psi, const Vec& theta) {
  return c_hat_from_u(u_hat(sample, psi, theta));
}

Mat sigma_hat(const Mat& lambda, const Mat& c) {
  if (lambda.rows() != c.rows() || lambda.cols() != c.cols()) throw InvalidArgument("sigma_hat: size mismatch");
  const Mat inv = checked_inverse(lambda, "Lambda");
  return symmetrize(inv * c * inv.transpose());
}

Mat lambda_empirical(const CensoredSample& sample, const PsiFunction& psi, const Vec& theta) {
  const KmplFit km = kmpl_fit(sample);
  const auto times = km.weighted_times();
  const auto w = km.weights();
  const Eigen::Map<const Vec> weights(w.data(), static_cast<Eigen::Index>(w.size()));
  const auto p = static_cast<Eigen::Index>(psi.dimension());
  Mat out(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double h = 1e-5 * (1.0 + std::fabs(theta[j]));
    Vec up = theta;
    Vec down = theta;
    up[j] += h;
    down[j] -= h;
    const Vec mean_up = psi.evaluate(times, up).transpose() * weights;
    const Vec mean_down = psi.evaluate(times, down).transpose() * weights;
    out.col(j) = (mean_up - mean_down) / (2.0 * h);
  }
  return out;
}

CovarianceEstimate estimate_covariance(const CensoredSample& sample, const PsiFunction& psi, const Vec& theta,
                                       const Mat& lambda) {
  CovarianceEstimate est;
  est.c_hat = c_hat(sample, psi, theta);
  est.lambda_hat = lambda;
  est.lambda_condition = condition_number(lambda);
  est.sigma_hat = sigma_hat(lambda, est.c_hat);
  return est;
}

CovarianceEstimate estimate_covariance(const CensoredSample& sample, const Family& fam, const Vec& theta,
                                       double alpha, LambdaKind kind) {
  const MdpdePsi psi(fam, alpha);
  const Mat lambda = kind == LambdaKind::Model ? lambda_model(fam, theta, alpha)
                                                : lambda_empirical(sample, psi, theta);
  return estimate_covariance(sample, psi, theta, lambda);
}

}  // namespace censwald
