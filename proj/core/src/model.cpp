#include "censwald/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "censwald/error.hpp"

namespace censwald {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_dimension(const Family& fam, const Vec& theta) {
  if (static_cast<std::size_t>(theta.size()) != fam.dimension()) {
    throw InvalidArgument(std::string(fam.name()) + ": expected " + std::to_string(fam.dimension()) +
                          " parameters, got " + std::to_string(theta.size()));
  }
}

void check_x(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidArgument("score: x must be positive and finite, got " + std::to_string(x));
  }
}

// Packs (xi, J, K) for p <= 2 into a fixed array so the integrators stay allocation free.
WeightedIntegrals unpack(const std::array<double, 6>& v, std::size_t p) {
  WeightedIntegrals out;
  out.xi = v[0];
  out.j = Vec(p);
  out.k = Mat(p, p);
  if (p == 1) {
    out.j[0] = v[1];
    out.k(0, 0) = v[2];
  } else {
    out.j << v[1], v[2];
    out.k << v[3], v[4], v[4], v[5];
  }
  return out;
}

}  // namespace

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be a finite nonnegative number, got " + std::to_string(alpha));
  }
}

double Family::density(double x, const Vec& theta) const {
  if (!(x > 0.0)) return 0.0;
  return std::exp(log_density(x, theta));
}

WeightedIntegrals Family::weighted_integrals(const Vec& theta, double alpha,
                                             const quad::Options& opt) const {
  return weighted_integrals_quadrature(*this, theta, alpha, opt);
}

// ---------------------------------------------------------------------------------------------
// Exponential

void ExponentialFamily::validate(const Vec& theta) const {
  check_dimension(*this, theta);
  if (!positive_finite(theta[0])) {
    throw InvalidArgument("exponential: mean must be positive, got " + std::to_string(theta[0]));
  }
}

double ExponentialFamily::log_density(double x, const Vec& theta) const {
  if (!(x >= 0.0)) return -std::numeric_limits<double>::infinity();
  return -std::log(theta[0]) - x / theta[0];
}

double ExponentialFamily::cdf(double x, const Vec& theta) const {
  if (!(x > 0.0)) return 0.0;
  return -std::expm1(-x / theta[0]);
}

double ExponentialFamily::quantile(double p, const Vec& theta) const {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidArgument("quantile: p must lie in [0, 1)");
  return -theta[0] * std::log1p(-p);
}

Vec ExponentialFamily::score(double x, const Vec& theta) const {
  check_x(x);
  const double t = theta[0];
  return Vec::Constant(1, (x - t) / (t * t));
}

WeightedIntegrals ExponentialFamily::weighted_integrals(const Vec& theta, double alpha,
                                                        const quad::Options&) const {
  validate(theta);
  check_alpha(alpha);
  const double t = theta[0];
  const double a1 = 1.0 + alpha;
  WeightedIntegrals out;
  out.xi = std::pow(t, -alpha) / a1;
  out.j = Vec::Constant(1, -alpha * std::pow(t, -(alpha + 1.0)) / (a1 * a1));
  out.k = Mat::Constant(1, 1, (1.0 + alpha * alpha) / (a1 * a1 * a1) * std::pow(t, -(alpha + 2.0)));
  return out;
}

// ---------------------------------------------------------------------------------------------
// Weibull

void WeibullFamily::validate(const Vec& theta) const {
  check_dimension(*this, theta);
  if (!positive_finite(theta[0]) || !positive_finite(theta[1])) {
    throw InvalidArgument("weibull: scale and shape must be positive, got (" +
                          std::to_string(theta[0]) + ", " + std::to_string(theta[1]) + ")");
  }
}

double WeibullFamily::log_density(double x, const Vec& theta) const {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double sigma = theta[0];
  const double b = theta[1];
  const double lr = std::log(x / sigma);
  return std::log(b / sigma) + (b - 1.0) * lr - std::exp(b * lr);
}

double WeibullFamily::cdf(double x, const Vec& theta) const {
  if (!(x > 0.0)) return 0.0;
  return -std::expm1(-std::pow(x / theta[0], theta[1]));
}

double WeibullFamily::quantile(double p, const Vec& theta) const {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidArgument("quantile: p must lie in [0, 1)");
  return theta[0] * std::pow(-std::log1p(-p), 1.0 / theta[1]);
}

Vec WeibullFamily::score(double x, const Vec& theta) const {
  check_x(x);
  const double sigma = theta[0];
  const double b = theta[1];
  const double lr = std::log(x / sigma);
  const double u = std::exp(b * lr);
  Vec s(2);
  s << (b / sigma) * (u - 1.0), 1.0 / b + lr * (1.0 - u);
  return s;
}

WeightedIntegrals WeibullFamily::weighted_integrals(const Vec& theta, double alpha,
                                                    const quad::Options& opt) const {
  validate(theta);
  check_alpha(alpha);
  const double sigma = theta[0];
  const double b = theta[1];
  const double a1 = 1.0 + alpha;
  // With u = (x / sigma)^b = e^s:  f^{1+a} dx = (b / sigma)^a exp(rate * s - (1 + a) e^s) ds.
  const double rate = a1 - alpha / b;
  if (!(rate > 0.0)) {
    throw NumericalError("weibull: int f^{1+alpha} diverges for shape " + std::to_string(b) +
                         " at alpha " + std::to_string(alpha));
  }
  const double front = std::pow(b / sigma, alpha);
  const double d_scale = b / sigma;
  auto integrand = [=](double s) {
    std::array<double, 6> y{};
    const double es = std::exp(s);
    const double w = front * std::exp(rate * s - a1 * es);
    if (w == 0.0) return y;
    const double u1 = d_scale * (es - 1.0);
    const double u2 = (1.0 + s * (1.0 - es)) / b;
    y[0] = w;
    y[1] = w * u1;
    y[2] = w * u2;
    y[3] = w * u1 * u1;
    y[4] = w * u1 * u2;
    y[5] = w * u2 * u2;
    return y;
  };
  const double center = std::log(rate / a1);
  return unpack(quad::integrate_real_line<6>(integrand, center, opt), 2);
}

// ---------------------------------------------------------------------------------------------

WeightedIntegrals weighted_integrals_quadrature(const Family& fam, const Vec& theta, double alpha,
                                                const quad::Options& opt) {
  fam.validate(theta);
  check_alpha(alpha);
  const std::size_t p = fam.dimension();
  if (p > 2) throw InvalidArgument("weighted_integrals_quadrature supports p <= 2");
  const double scale = fam.scale(theta);
  auto integrand = [&](double s) {
    std::array<double, 6> y{};
    const double x = scale * std::exp(s);
    if (!(x > 0.0) || !std::isfinite(x)) return y;
    const double lf = fam.log_density(x, theta);
    const double w = std::exp((1.0 + alpha) * lf) * x;
    if (w == 0.0 || !std::isfinite(w)) return y;
    const Vec u = fam.score(x, theta);
    y[0] = w;
    if (p == 1) {
      y[1] = w * u[0];
      y[2] = w * u[0] * u[0];
    } else {
      y[1] = w * u[0];
      y[2] = w * u[1];
      y[3] = w * u[0] * u[0];
      y[4] = w * u[0] * u[1];
      y[5] = w * u[1] * u[1];
    }
    return y;
  };
  return unpack(quad::integrate_real_line<6>(integrand, 0.0, opt), p);
}

Vec mdpde_psi(const Family& fam, const Vec& theta, double alpha, double x, const Vec& j_alpha) {
  check_x(x);
  const Vec u = fam.score(x, theta);
  if (alpha == 0.0) return j_alpha - u;
  return j_alpha - u * std::exp(alpha * fam.log_density(x, theta));
}

Vec mdpde_psi(const Family& fam, const Vec& theta, double alpha, double x) {
  return mdpde_psi(fam, theta, alpha, x, fam.weighted_integrals(theta, alpha).j);
}

Mat lambda_model(const Family& fam, const Vec& theta, double alpha) {
  const Mat k = fam.weighted_integrals(theta, alpha).k;
  if (!std::isfinite(k.sum()) || !(condition_number(k) < 1e14)) {
    throw NumericalError("Lambda(psi; theta) is singular or non-finite");
  }
  return k;
}

// ---------------------------------------------------------------------------------------------

const Family& exponential_family() {
  static const ExponentialFamily instance;
  return instance;
}

const Family& weibull_family() {
  static const WeibullFamily instance;
  return instance;
}

const Family& family(FamilyId id) {
  switch (id) {
    case FamilyId::Exponential:
      return exponential_family();
    case FamilyId::Weibull:
      return weibull_family();
  }
  throw InvalidArgument("unknown family id");
}

const Family& family_by_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "exp" || lower == "exponential") return exponential_family();
  if (lower == "weibull") return weibull_family();
  throw InvalidArgument("unknown family '" + std::string(name) + "' (expected exp or weibull)");
}

}  // namespace censwald
