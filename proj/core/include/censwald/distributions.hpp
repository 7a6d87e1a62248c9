#pragma once

#include <vector>

namespace censwald::dist {

double normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate far into the tail.
double normal_sf(double x);
/// Phi^{-1}(p).
double normal_quantile(double p);

/// P(chi2_df > x).
double chi2_sf(double x, double df);
/// chi2_{df, level}: the point with upper-tail probability `level`.
double chi2_upper_quantile(double level, double df);
/// Density of chi2_df at x.
double chi2_pdf(double x, double df);

/// Poisson(s / 2) probabilities C_0, C_1, ... of the noncentral chi-square mixture, truncated
/// once the omitted tail is below 1e-13 (or at v_max when that comes first).
std::vector<double> noncentral_weights(double s, int v_max = 100000);

/// P(chi2_df(ncp) > x) as the Poisson mixture sum_v C_v P(chi2_{df+2v} > x).
double noncentral_chi2_sf(double x, double df, double ncp);

}  // namespace censwald::dist
