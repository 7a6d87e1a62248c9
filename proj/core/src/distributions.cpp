#include "censwald/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "censwald/error.hpp"

namespace censwald::dist {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double chi2_sf(double x, double df) {
  if (!(df > 0.0)) throw InvalidArgument("chi2: degrees of freedom must be positive");
  if (std::isnan(x)) return x;
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chi2_upper_quantile(double level, double df) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("chi2 quantile: level must lie in (0, 1)");
  if (!(df > 0.0)) throw InvalidArgument("chi2: degrees of freedom must be positive");
  return 2.0 * boost::math::gamma_q_inv(0.5 * df, level);
}

double chi2_pdf(double x, double df) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) return df == 2.0 ? 0.5 : (df < 2.0 ? INFINITY : 0.0);
  return 0.5 * boost::math::gamma_p_derivative(0.5 * df, 0.5 * x);
}

std::vector<double> noncentral_weights(double s, int v_max) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("noncentral weights: s must be finite and >= 0");
  if (v_max < 0) throw InvalidArgument("noncentral weights: v_max must be >= 0");
  if (s == 0.0) return {1.0};
  const boost::math::poisson_distribution<double> pois(0.5 * s);
  int last = v_max;
  for (int v = static_cast<int>(std::floor(0.5 * s)); v < v_max; ++v) {
    if (boost::math::cdf(boost::math::complement(pois, static_cast<double>(v))) < 1e-13) {
      last = v;
      break;
    }
  }
  std::vector<double> w(static_cast<std::size_t>(last) + 1);
  for (int v = 0; v <= last; ++v) w[static_cast<std::size_t>(v)] = boost::math::pdf(pois, static_cast<double>(v));
  return w;
}

double noncentral_chi2_sf(double x, double df, double ncp) {
  const auto w = noncentral_weights(ncp);
  double sum = 0.0;
  for (std::size_t v = 0; v < w.size(); ++v) sum += w[v] * chi2_sf(x, df + 2.0 * static_cast<double>(v));
  return std::min(1.0, sum);
}

}  // namespace censwald::dist
