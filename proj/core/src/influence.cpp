#include "censwald/influence.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "censwald/error.hpp"
#include "censwald/psi.hpp"

namespace censwald {

namespace {

void check_null(const Vec& mv, const Vec& theta0) {
  if (mv.norm() > 1e-8 * (1.0 + theta0.norm()))
    throw InvalidArgument("theta0 does not satisfy the null hypothesis");
}

Mat quad_form_matrix(const Mat& mj, const Mat& sigma) {
  return mj * checked_inverse(symmetrize(mj.transpose() * sigma * mj), "M^T Sigma M") * mj.transpose();
}

}  // namespace

Vec if_estimator(const Family& fam, const Vec& theta0, double alpha, double t) {
  fam.validate(theta0);
  const Mat lambda = lambda_model(fam, theta0, alpha);
  return lambda.partialPivLu().solve(mdpde_psi(fam, theta0, alpha, t));
}

Vec if_estimator(const PsiFunction& psi, const Mat& lambda, const Vec& theta0, double t) {
  return checked_inverse(lambda, "Lambda") * psi.evaluate(t, theta0);
}

Mat sigma_model(const Family& fam, const Vec& theta, double alpha) {
  const WeightedIntegrals w1 = fam.weighted_integrals(theta, alpha);
  const WeightedIntegrals w2 = fam.weighted_integrals(theta, 2.0 * alpha);
  const Mat c = symmetrize(w2.k - w1.j * w1.j.transpose());
  const Mat inv = checked_inverse(w1.k, "Lambda");
  return symmetrize(inv * c * inv.transpose());
}

IfCurve if_curve(const Family& fam, const Vec& theta0, double alpha, std::span<const double> grid) {
  IfCurve c;
  c.kind = "estimator";
  c.family = fam.id();
  c.theta0 = theta0;
  c.alpha = alpha;
  c.t.assign(grid.begin(), grid.end());
  c.columns = fam.parameter_names();
  const Mat lambda = lambda_model(fam, theta0, alpha);
  const auto lu = lambda.partialPivLu();
  const Vec j = fam.weighted_integrals(theta0, alpha).j;
  c.values.resize(static_cast<Eigen::Index>(grid.size()), theta0.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    c.values.row(static_cast<Eigen::Index>(i)) = lu.solve(mdpde_psi(fam, theta0, alpha, grid[i], j)).transpose();
  return c;
}

void write_if_curve_csv(const IfCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17) << "t";
  for (const auto& name : curve.columns) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    out << curve.t[i];
    for (Eigen::Index k = 0; k < curve.values.cols(); ++k) out << ',' << curve.values(static_cast<Eigen::Index>(i), k);
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

double if2_wald(const Family& fam, const Vec& theta0, double alpha, const Restriction& restriction,
                const Mat& sigma, double t) {
  restriction.check_rank(theta0);
  check_null(restriction.m(theta0), theta0);
  const Vec inf = if_estimator(fam, theta0, alpha, t);
  const Mat a = quad_form_matrix(restriction.jacobian(theta0), sigma);
  return std::max(0.0, 2.0 * inf.dot(a * inf));
}

double k_star(std::size_t r, double s, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  if (r == 0) throw InvalidArgument("k_star: r must be positive");
  const double df = static_cast<double>(r);
  const double q = dist::chi2_upper_quantile(level, df);
  const auto c = noncentral_weights(s);
  double sum = 0.0;
  double p_v = dist::chi2_sf(q, df);
  for (std::size_t v = 0; v < c.size(); ++v) {
    const double p_next = dist::chi2_sf(q, df + 2.0 * static_cast<double>(v + 1));
    sum += c[v] * (p_next - p_v);
    p_v = p_next;
  }
  return sum;
}

double contaminated_power(const Vec& d, const Vec& influence, double eps, const Restriction& restriction,
                          const Mat& sigma, const Vec& theta0, double level) {
  const Vec de = d + eps * influence;
  const Mat a = quad_form_matrix(restriction.jacobian(theta0), sigma);
  const double s = std::max(0.0, de.dot(a * de));
  const double df = static_cast<double>(restriction.r);
  return dist::noncentral_chi2_sf(dist::chi2_upper_quantile(level, df), df, s);
}

double pif(const Family& fam, const Vec& theta0, double alpha, const Restriction& restriction, const Mat& sigma,
           const Vec& d, double t, double level) {
  restriction.check_rank(theta0);
  check_null(restriction.m(theta0), theta0);
  if (d.size() != theta0.size()) throw InvalidArgument("pif: d has wrong dimension");
  if (d.norm() == 0.0) throw InvalidArgument("pif: d must be nonzero (use lif)");
  const Mat a = quad_form_matrix(restriction.jacobian(theta0), sigma);
  const Vec s0 = a * d;  // S0^T
  const double s = std::max(0.0, d.dot(s0));
  return k_star(restriction.r, s, level) * s0.dot(if_estimator(fam, theta0, alpha, t));
}

double lif(const Family& fam, const Vec& theta0, double alpha, const Restriction& restriction, const Mat& sigma,
           double t, double level) {
  restriction.check_rank(theta0);
  check_null(restriction.m(theta0), theta0);
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  (void)sigma;
  if (!if_estimator(fam, theta0, alpha, t).allFinite()) throw NumericalError("lif: IF is not finite");
  return 0.0;
}

double if2_two_sample(const Family& fam, const Vec& theta10, const Vec& theta20, double alpha,
                      const TwoSampleRestriction& restriction, const Mat& sigma1, const Mat& sigma2, double omega,
                      std::optional<double> t1, std::optional<double> t2) {
  if (!t1 && !t2) throw InvalidArgument("if2_two_sample: at least one contamination point is required");
  if (!(omega > 0.0 && omega < 1.0)) throw InvalidArgument("omega must lie in (0, 1)");
  restriction.check_rank(theta10, theta20);
  const Vec mv = restriction.m(theta10, theta20);
  if (mv.norm() > 1e-8 * (1.0 + theta10.norm() + theta20.norm()))
    throw InvalidArgument("(theta10, theta20) does not satisfy the null hypothesis");
  const Mat m1 = restriction.jacobian1(theta10, theta20);
  const Mat m2 = restriction.jacobian2(theta10, theta20);
  const Mat pooled = pooled_sigma(m1, sigma1, omega, m2, sigma2, 1.0 - omega);
  Vec q = Vec::Zero(static_cast<Eigen::Index>(restriction.r));
  if (t1) q += m1.transpose() * if_estimator(fam, theta10, alpha, *t1);
  if (t2) q += m2.transpose() * if_estimator(fam, theta20, alpha, *t2);
  return std::max(0.0, 2.0 * q.dot(checked_inverse(pooled, "pooled Sigma") * q));
}

}  // namespace censwald
