#include "censwald/kmpl.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>

namespace censwald {

KmplFit kmpl_fit(const CensoredSample& sample) {
  KmplFit fit;
  const std::size_t n = sample.size();
  double survival = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = sample[i];
    if (!o.event()) continue;
    // factor [1 - delta_[i] / (n - i + 1)] with 1-based i
    const double next = survival * (1.0 - 1.0 / static_cast<double>(n - i));
    const double jump = survival - next;
    survival = next;
    if (!fit.support.empty() && fit.support.back() == o.z) {
      fit.jumps.back() += jump;
      fit.cdf_values.back() = 1.0 - survival;
    } else {
      fit.support.push_back(o.z);
      fit.jumps.push_back(jump);
      fit.cdf_values.push_back(1.0 - survival);
    }
  }
  fit.total_mass = fit.cdf_values.empty() ? 0.0 : fit.cdf_values.back();
  fit.tail_time = sample.times().back();
  fit.residual_mass = sample[n - 1].event() ? 0.0 : std::max(0.0, survival);
  return fit;
}

double KmplFit::cdf(double x) const {
  auto it = std::upper_bound(support.begin(), support.end(), x);
  if (it == support.begin()) return 0.0;
  return cdf_values[static_cast<std::size_t>(it - support.begin()) - 1];
}

std::vector<double> KmplFit::weighted_times() const {
  std::vector<double> t(support);
  if (residual_mass > 0.0 && (t.empty() || t.back() != tail_time)) t.push_back(tail_time);
  return t;
}

std::vector<double> KmplFit::weights() const {
  std::vector<double> w(jumps);
  if (residual_mass > 0.0) {
    if (!support.empty() && support.back() == tail_time) {
      w.back() += residual_mass;
    } else {
      w.push_back(residual_mass);
    }
  }
  return w;
}

SubdistEmpiricals::SubdistEmpiricals(const CensoredSample& sample)
    : times_(sample.times().begin(), sample.times().end()), n_(sample.size()) {
  censored_prefix_.assign(n_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    censored_prefix_[i + 1] = censored_prefix_[i] + (sample[i].event() ? 0 : 1);
  }
}

std::size_t SubdistEmpiricals::count_le(double z) const {
  return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), z) - times_.begin());
}

double SubdistEmpiricals::g_z(double z) const { return static_cast<double>(count_le(z)) / static_cast<double>(n_); }

double SubdistEmpiricals::g_z0(double z) const {
  return static_cast<double>(censored_prefix_[count_le(z)]) / static_cast<double>(n_);
}

double SubdistEmpiricals::g_z1(double z) const {
  const std::size_t k = count_le(z);
  return static_cast<double>(k - censored_prefix_[k]) / static_cast<double>(n_);
}

SubdistEmpiricals subdist_empiricals(const CensoredSample& sample) { return SubdistEmpiricals(sample); }

void write_kmpl_csv(const KmplFit& fit, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file '" + path.string() + "'");
  out << "time,cdf,jump,log_time,log_cumhaz\n" << std::setprecision(12);
  for (std::size_t i = 0; i < fit.support.size(); ++i) {
    const double t = fit.support[i];
    const double g = fit.cdf_values[i];
    out << t << ',' << g << ',' << fit.jumps[i] << ',';
    if (t > 0.0) out << std::log(t);
    out << ',';
    // -log(1 - G) is infinite once all mass is used up; leave the cell empty then.
    if (g < 1.0 && g > 0.0) out << std::log(-std::log1p(-g));
    out << '\n';
  }
}

}  // namespace censwald
