#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "censwald/data.hpp"
#include "censwald/error.hpp"

namespace censwald {

/// Kaplan-Meier product-limit estimate of the lifetime distribution G_X.
///
/// `support`/`jumps` hold the raw (possibly defective) estimate at the distinct event times.
/// When the largest observation is censored, `residual_mass` = 1 - total_mass is reassigned
/// to `tail_time` for integration; weighted_support() exposes that completed distribution.
struct KmplFit {
  std::vector<double> support;
  std::vector<double> cdf_values;
  std::vector<double> jumps;
  double total_mass = 0.0;
  double residual_mass = 0.0;
  double tail_time = 0.0;

  /// Right-continuous G_X-hat(x) of the raw estimate; 0 below the first event time.
  double cdf(double x) const;

  /// Support points and weights after tail reassignment (weights sum to 1).
  std::vector<double> weighted_times() const;
  std::vector<double> weights() const;

  /// Reported when the reassigned tail mass is large enough to matter.
  bool heavy_tail_flag() const noexcept { return residual_mass > 0.05; }
};

KmplFit kmpl_fit(const CensoredSample& sample);

/// Empirical (sub-)distribution functions of (Z, delta):
/// G_Z(z) = #{Z_i <= z}/n and G_{Z,j}(z) = #{Z_i <= z, delta_i = j}/n.
class SubdistEmpiricals {
 public:
  explicit SubdistEmpiricals(const CensoredSample& sample);

  double g_z(double z) const;
  double g_z0(double z) const;
  double g_z1(double z) const;

 private:
  std::size_t count_le(double z) const;
  std::vector<double> times_;
  std::vector<std::size_t> censored_prefix_;  // censorings among the first k observations
  std::size_t n_;
};

SubdistEmpiricals subdist_empiricals(const CensoredSample& sample);

/// int phi dG_X-hat using the tail-completed weights. Throws NumericalError when phi is
/// non-finite at a support point.
template <class Phi>
double km_integral(const KmplFit& fit, Phi&& phi) {
  const auto times = fit.weighted_times();
  const auto w = fit.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double v = phi(times[i]);
    if (!std::isfinite(v)) throw NumericalError("km_integral: integrand is not finite at a support point");
    sum += w[i] * v;
  }
  return sum;
}

/// Writes time, cdf, jump, log_time, log_cumhaz (the log-log cumulative hazard plot data).
void write_kmpl_csv(const KmplFit& fit, const std::filesystem::path& path);

}  // namespace censwald
