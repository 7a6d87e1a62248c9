#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "censwald/data.hpp"
#include "censwald/linalg.hpp"
#include "censwald/rng.hpp"

namespace censwald::fixtures {

inline CensoredSample make_sample(std::vector<double> z, std::vector<int> d) { return CensoredSample(z, d); }

inline CensoredSample uncensored(const std::vector<double>& z) { return CensoredSample(z, std::vector<int>(z.size(), 1)); }

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Weibull draws by inversion, independent of the library's simulator.
inline std::vector<double> weibull_draws(std::size_t n, double scale, double shape, std::uint64_t seed) {
  Xoshiro256 g(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = scale * std::pow(-std::log(g.uniform()), 1.0 / shape);
  return x;
}

// Classical Weibull MLE from the profile equation in the shape.
inline Vec weibull_mle(const std::vector<double>& x) {
  double mean_log = 0.0;
  for (double v : x) mean_log += std::log(v);
  mean_log /= static_cast<double>(x.size());
  auto profile = [&](double b) {
    double s = 0.0, sl = 0.0;
    for (double v : x) {
      const double p = std::pow(v, b);
      s += p;
      sl += p * std::log(v);
    }
    return 1.0 / b + mean_log - sl / s;
  };
  std::uintmax_t iters = 200;
  boost::math::tools::eps_tolerance<double> tol(50);
  const auto [lo, hi] = boost::math::tools::toms748_solve(profile, 0.05, 50.0, tol, iters);
  const double b = 0.5 * (lo + hi);
  double s = 0.0;
  for (double v : x) s += std::pow(v, b);
  return vec({std::pow(s / static_cast<double>(x.size()), 1.0 / b), b});
}

// Exponential(mean theta) closed forms for the alpha-weighted integrals.
inline double exp_xi(double theta, double a) { return std::pow(theta, -a) / (1.0 + a); }
inline double exp_j(double theta, double a) { return -a * std::pow(theta, -a - 1.0) / ((1.0 + a) * (1.0 + a)); }
inline double exp_k(double theta, double a) {
  return std::pow(theta, -a - 2.0) * (1.0 + a * a) / std::pow(1.0 + a, 3.0);
}
inline double exp_psi(double theta, double a, double t) {
  const double u = (t - theta) / (theta * theta);
  const double f = std::exp(-t / theta) / theta;
  return exp_j(theta, a) - u * std::pow(f, a);
}
inline double exp_if(double theta, double a, double t) { return exp_psi(theta, a, t) / exp_k(theta, a); }

}  // namespace censwald::fixtures
