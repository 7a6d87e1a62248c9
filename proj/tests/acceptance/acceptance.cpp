// Acceptance checks for the library as a whole. Each criterion prints one PASS/FAIL line followed
// by the numbers it was judged on. Run all of them, or one with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>
#include <CLI11.hpp>

#include "censwald/data.hpp"
#include "censwald/distributions.hpp"
#include "censwald/estimator.hpp"
#include "censwald/hypothesis.hpp"
#include "censwald/influence.hpp"
#include "censwald/kmpl.hpp"
#include "censwald/montecarlo.hpp"
#include "censwald/quadrature.hpp"
#include "censwald/twosample.hpp"

using namespace censwald;

namespace {

unsigned g_workers = 1;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    detail << "    [" << (ok ? "ok" : "FAIL") << "] " << what << '\n';
    pass = pass && ok;
  }
};

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Restriction simple_named(const Vec& theta0, const std::string& name) { return Restriction::simple(theta0, name); }

const RejectionRow& row_for(const ExperimentReport& r, double alpha, const std::string& hyp) {
  for (const auto& row : r.rejections)
    if (std::fabs(row.alpha - alpha) < 1e-12 && row.hypothesis == hyp) return row;
  throw std::runtime_error("missing row " + hyp);
}

// The Weibull(2, 5) level/power runs use the empirical Lambda-hat in the sandwich (see criterion 2).
SyntheticDesign reference_design(double contamination) {
  SyntheticDesign d;
  d.lifetime = {FamilyId::Weibull, vec({2.0, 5.0})};
  d.censoring_mean = censoring_mean_for_rate(d.lifetime, 0.10);
  d.contamination_fraction = contamination;
  d.contamination = {FamilyId::Exponential, vec({5.0})};
  d.seed = 20240601;
  return d;
}

std::vector<Restriction> reference_hypotheses() {
  return {simple_named(vec({2.0, 5.0}), "H1: scale=2,shape=5"),
          simple_named(vec({2.2, 2.3}), "H2: scale=2.2,shape=2.3"),
          Restriction::component(2, 1, 5.0, "H3: shape=5"), Restriction::component(2, 1, 2.0, "H4: shape=2")};
}

double ks_uniform(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - p[i]);
    d = std::max(d, p[i] - static_cast<double>(i) / n);
  }
  return d;
}

// ---------------------------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  ExperimentSpec s;
  s.design = reference_design(0.0);
  s.n = 100;
  s.replications = 1000;
  s.alpha_grid = {0.0, 0.3, 1.0};
  s.hypotheses = reference_hypotheses();
  s.fit.lambda_kind = LambdaKind::Empirical;
  s.workers = g_workers;
  const ExperimentReport r = run_experiment(s);
  const double want[] = {0.070, 0.054, 0.063};
  for (std::size_t k = 0; k < 3; ++k) {
    const double a = s.alpha_grid[k];
    const auto& h1 = row_for(r, a, "H1: scale=2,shape=5");
    o.check(std::fabs(h1.rate - want[k]) <= 0.03,
            "H1 level at alpha=" + num(a, 1) + ": " + num(h1.rate, 3) + " (target " + num(want[k], 3) + " +- 0.03)");
    const auto& h2 = row_for(r, a, "H2: scale=2.2,shape=2.3");
    const auto& h4 = row_for(r, a, "H4: shape=2");
    o.check(h2.rate >= 0.99, "H2 power at alpha=" + num(a, 1) + ": " + num(h2.rate, 3) + " (>= 0.99)");
    o.check(h4.rate >= 0.99, "H4 power at alpha=" + num(a, 1) + ": " + num(h4.rate, 3) + " (>= 0.99)");
  }
  o.check(r.valid, "fit failures " + std::to_string(r.total_failures()) + " within budget");
  return o;
}

Outcome criterion2() {
  Outcome o;
  ExperimentSpec s;
  s.design = reference_design(0.05);
  s.n = 100;
  s.replications = 1000;
  s.alpha_grid = {0.0, 0.5};
  s.hypotheses = reference_hypotheses();
  // Lambda(psi; theta-hat) is only right at the model; under contamination the sandwich needs the
  // KM-weighted Lambda-hat. With the model version H3 at alpha=0.5 lands near 0.107.
  s.fit.lambda_kind = LambdaKind::Empirical;
  s.workers = g_workers;
  const ExperimentReport r = run_experiment(s);
  const auto& h1a0 = row_for(r, 0.0, "H1: scale=2,shape=5");
  const auto& h1a5 = row_for(r, 0.5, "H1: scale=2,shape=5");
  const auto& h3a0 = row_for(r, 0.0, "H3: shape=5");
  const auto& h3a5 = row_for(r, 0.5, "H3: shape=5");
  o.check(h1a0.rate >= 0.80, "H1 rejection at alpha=0: " + num(h1a0.rate, 3) + " (>= 0.80)");
  o.check(std::fabs(h1a5.rate - 0.074) <= 0.03, "H1 rejection at alpha=0.5: " + num(h1a5.rate, 3) + " (0.074 +- 0.03)");
  o.check(h3a0.rate >= 0.80, "H3 rejection at alpha=0: " + num(h3a0.rate, 3) + " (>= 0.80)");
  o.check(std::fabs(h3a5.rate - 0.075) <= 0.03, "H3 rejection at alpha=0.5: " + num(h3a5.rate, 3) + " (0.075 +- 0.03)");
  o.check(r.valid, "fit failures " + std::to_string(r.total_failures()) + " within budget");
  return o;
}

Outcome criterion3() {
  Outcome o;
  ExperimentSpec s;
  s.kind = ExperimentKind::VarianceRatio;
  s.design = reference_design(0.0);
  s.n = 200;
  s.replications = 1000;
  s.alpha_grid = {0.0, 0.5, 1.0};
  s.workers = g_workers;
  const ExperimentReport r = run_experiment(s);
  for (const auto& e : r.estimates)
    o.check(e.ratio >= 0.75 && e.ratio <= 1.3, "R at alpha=" + num(e.alpha, 1) + " for " + e.parameter + ": " +
                                                   num(e.ratio, 3) + " (in [0.75, 1.3])");
  o.check(r.estimates.size() == 6, "six ratios reported");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const Family& fam = exponential_family();
  double err_psi = 0, err_lambda = 0, err_if = 0, err_lib = 0, err_exact = 0;
  for (double theta : {0.25, 1.0, 3.0, 12.0}) {
    for (double a : {0.0, 0.1, 0.5, 1.0, 2.0}) {
      // Closed forms for Exp(mean theta).
      const double j = -a * std::pow(theta, -a - 1) / ((1 + a) * (1 + a));
      const double k = std::pow(theta, -a - 2) * (1 + a * a) / std::pow(1 + a, 3);
      const auto wq = weighted_integrals_quadrature(fam, vec({theta}), a, {1e-14, 1e-13, 45});
      err_lambda = std::max(err_lambda, std::fabs(wq.k(0, 0) - k) / k);
      err_lambda = std::max(err_lambda, std::fabs(lambda_model(fam, vec({theta}), a)(0, 0) - k) / k);
      for (double t : {1e-3, 0.1, 0.5, 1.0, 2.5, 7.0, 30.0, 200.0}) {
        const double f = std::exp(-t / theta) / theta;
        const double u = (t - theta) / (theta * theta);
        const double psi = j - u * std::pow(f, a);
        const double scale = 1 + std::fabs(psi);
        const double psi_pipe = wq.j[0] - fam.score(t, vec({theta}))[0] * std::pow(fam.density(t, vec({theta})), a);
        err_psi = std::max(err_psi, std::fabs(psi_pipe - psi) / scale);
        err_psi = std::max(err_psi, std::fabs(mdpde_psi(fam, vec({theta}), a, t)[0] - psi) / scale);
        const double iff = psi / k;
        err_if = std::max(err_if, std::fabs(psi_pipe / wq.k(0, 0) - iff) / (1 + std::fabs(iff)));
        err_lib = std::max(err_lib, std::fabs(if_estimator(fam, vec({theta}), a, t)[0] - iff) / (1 + std::fabs(iff)));
        if (a == 0.0) {
          const double got = if_estimator(fam, vec({theta}), 0.0, t)[0];
          err_exact = std::max(err_exact, std::fabs(got - (theta - t)) / std::max(1.0, std::fabs(theta - t)));
        }
      }
    }
  }
  o.check(err_psi <= 1e-8, "psi: max relative error " + sci(err_psi));
  o.check(err_lambda <= 1e-8, "Lambda: max relative error " + sci(err_lambda));
  o.check(err_if <= 1e-8, "IF through quadrature: max relative error " + sci(err_if));
  o.check(err_lib <= 1e-8, "IF from the library: max relative error " + sci(err_lib));
  o.check(err_exact <= 4 * std::numeric_limits<double>::epsilon(),
          "alpha=0 IF equals theta0 - t: max relative error " + sci(err_exact));
  return o;
}

Vec independent_weibull_mle(const std::vector<double>& x) {
  double mean_log = 0;
  for (double v : x) mean_log += std::log(v);
  mean_log /= static_cast<double>(x.size());
  auto profile = [&](double b) {
    double s = 0, sl = 0;
    for (double v : x) {
      const double p = std::pow(v, b);
      s += p;
      sl += p * std::log(v);
    }
    return 1 / b + mean_log - sl / s;
  };
  std::uintmax_t it = 300;
  boost::math::tools::eps_tolerance<double> tol(52);
  const auto br = boost::math::tools::toms748_solve(profile, 0.05, 50.0, tol, it);
  const double b = 0.5 * (br.first + br.second);
  double s = 0;
  for (double v : x) s += std::pow(v, b);
  return vec({std::pow(s / static_cast<double>(x.size()), 1 / b), b});
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 gen(12345);
  double err_exp = 0, err_wei = 0, err_ecdf = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 30 + 17 * static_cast<std::size_t>(rep);
    std::exponential_distribution<double> ex(1.0 / 2.5);
    std::weibull_distribution<double> wb(1.3 + 0.2 * rep, 3.0);
    std::vector<double> xe(n), xw(n);
    for (auto& v : xe) v = ex(gen);
    for (auto& v : xw) v = wb(gen);
    const std::vector<int> ones(n, 1);

    FitConfig c;
    c.alpha = 0.0;
    const FitResult fe = fit(CensoredSample(xe, ones), exponential_family(), c);
    double mean = 0;
    for (double v : xe) mean += v;
    mean /= static_cast<double>(n);
    err_exp = std::max(err_exp, fe.converged ? std::fabs(fe.theta_hat[0] - mean) / mean : INFINITY);

    const FitResult fw = fit(CensoredSample(xw, ones), weibull_family(), c);
    const Vec mle = independent_weibull_mle(xw);
    err_wei = std::max(err_wei, fw.converged ? (fw.theta_hat - mle).cwiseQuotient(mle).cwiseAbs().maxCoeff() : INFINITY);

    const KmplFit km = kmpl_fit(CensoredSample(xw, ones));
    std::vector<double> sorted = xw;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      const double ecdf = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), sorted[i]) - sorted.begin()) /
                          static_cast<double>(n);
      err_ecdf = std::max(err_ecdf, std::fabs(km.cdf(sorted[i]) - ecdf));
      const double mid = i + 1 < n ? 0.5 * (sorted[i] + sorted[i + 1]) : sorted[i] + 1;
      err_ecdf = std::max(err_ecdf, std::fabs(km.cdf(mid) - ecdf));
    }
  }
  o.check(err_exp <= 1e-12, "Exponential alpha=0 fit vs sample mean: max relative error " + sci(err_exp));
  o.check(err_wei <= 1e-6, "Weibull alpha=0 fit vs classical MLE: max relative error " + sci(err_wei));
  o.check(err_ecdf <= 1e-14, "KMPL vs ECDF: max abs difference " + sci(err_ecdf));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const std::vector<double> alphas{0.0, 0.5};
  const std::size_t reps = 1000;

  ExperimentSpec s;
  s.design = reference_design(0.0);
  s.n = 200;
  s.replications = reps;
  s.alpha_grid = alphas;
  s.hypotheses = {simple_named(vec({2.0, 5.0}), "scale=2,shape=5"), Restriction::component(2, 1, 5.0, "shape=5")};
  s.keep_p_values = true;
  s.workers = g_workers;
  const ExperimentReport r = run_experiment(s);
  for (const auto& row : r.rejections) {
    const double d = ks_uniform(row.p_values);
    o.check(d < 0.06, "one-sample " + row.hypothesis + " alpha=" + num(row.alpha, 1) + ": KS " + num(d) + " over " +
                          std::to_string(row.p_values.size()) + " p-values");
  }

  // Two arms drawn from the same law; both the full and the shape-only homogeneity nulls hold.
  SyntheticDesign d = reference_design(0.0);
  d.seed = 777;
  const std::size_t n1 = 120, n2 = 150;
  const auto full = TwoSampleRestriction::homogeneity(2, "theta1=theta2");
  const auto shape = TwoSampleRestriction::component_homogeneity(2, 1, Direction::Greater, "shape1=shape2");
  std::vector<std::array<double, 6>> p(reps);
  std::vector<char> ok(reps, 0);
  parallel_for(reps, g_workers, [&](std::size_t i) {
    const CensoredSample x1 = simulate(d, n1, 2 * i);
    const CensoredSample x2 = simulate(d, n2, 2 * i + 1);
    FitConfig c;
    c.n_multistart = 0;
    std::array<double, 6> out{};
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      c.alpha = alphas[k];
      const FitResult f1 = fit(x1, weibull_family(), c);
      const FitResult f2 = fit(x2, weibull_family(), c);
      if (!f1.converged || !f2.converged) return;
      out[3 * k] = two_sample_wald(f1, n1, f2, n2, full).p_value;
      out[3 * k + 1] = two_sample_wald(f1, n1, f2, n2, shape).p_value;
      out[3 * k + 2] = one_sided_wald(f1, n1, f2, n2, shape).p_value;
    }
    p[i] = out;
    ok[i] = 1;
  });
  const std::size_t valid = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
  o.check(valid >= reps * 98 / 100, "two-sample replications with both fits converged: " + std::to_string(valid));
  const char* names[] = {"theta1=theta2", "shape1=shape2", "shape1=shape2 one-sided"};
  for (std::size_t k = 0; k < alphas.size(); ++k)
    for (std::size_t h = 0; h < 3; ++h) {
      std::vector<double> col;
      for (std::size_t i = 0; i < reps; ++i)
        if (ok[i]) col.push_back(p[i][3 * k + h]);
      const double dks = ks_uniform(col);
      o.check(dks < 0.06, std::string("two-sample ") + names[h] + " alpha=" + num(alphas[k], 1) + ": KS " + num(dks));
    }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto arms = ingest_csv_arms(bundled_dataset("veteran"), {"time_days", "status"}, "arm");
  const CensoredSample& a = arms.at("A");
  const CensoredSample& b = arms.at("B");
  const std::vector<double> grid{0.0, 0.2, 0.5, 1.0};
  const auto fa = fit_grid(a, weibull_family(), grid, FitConfig{});
  const auto fb = fit_grid(b, weibull_family(), grid, FitConfig{});
  auto fit_line = [&](const FitResult& f, double s0, double b0) {
    const bool ok = f.converged && std::fabs(f.theta_hat[0] - s0) <= 3 && std::fabs(f.theta_hat[1] - b0) <= 0.05;
    o.check(ok, "arm A alpha=" + num(f.alpha, 1) + ": (" + num(f.theta_hat[0], 3) + ", " + num(f.theta_hat[1], 4) +
                    ") target (" + num(s0, 0) + ", " + num(b0, 2) + ") within (3, 0.05)");
  };
  fit_line(fa[0], 123, 0.99);
  fit_line(fa[3], 122, 0.97);
  const auto r = TwoSampleRestriction::component_homogeneity(2, 1, Direction::Greater, "shape1=shape2");
  const double want[] = {0.14, 0.39, 0.56};
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!fa[k].converged || !fb[k].converged) {
      o.check(false, "fits at alpha=" + num(grid[k], 1) + " converged");
      continue;
    }
    const double pv = one_sided_wald(fa[k], a.size(), fb[k], b.size(), r).p_value;
    o.check(std::fabs(pv - want[k - 1]) <= 0.05, "one-sided shape p at alpha=" + num(grid[k], 1) + ": " + num(pv, 3) +
                                                    " (target " + num(want[k - 1], 2) + " +- 0.05)");
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  struct Case {
    const Family* fam;
    Vec theta;
    Vec d;
  };
  const std::vector<Case> cases{{&exponential_family(), vec({1.0}), vec({1.0})},
                                {&weibull_family(), vec({2.0, 5.0}), vec({1.0, 1.0})}};
  auto grid = [](double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
  };
  // Geometric over (1e-8, hi) plus a uniform grid over the bulk of the model, where the extrema sit.
  auto mixed = [&](double hi, double bulk, std::size_t n) {
    auto g = grid(1e-8, hi, n);
    for (std::size_t i = 1; i <= n; ++i) g.push_back(bulk * static_cast<double>(i) / static_cast<double>(n));
    return g;
  };
  for (const auto& c : cases) {
    const Restriction r = Restriction::simple(c.theta);
    const double bulk = 10 * c.fam->scale(c.theta);
    for (double a : {0.0, 0.5, 1.0}) {
      const Mat sigma = sigma_model(*c.fam, c.theta, a);
      auto sups = [&](const std::vector<double>& g) {
        std::array<double, 3> s{0, 0, 0};
        for (double t : g) {
          s[0] = std::max(s[0], if_estimator(*c.fam, c.theta, a, t).norm());
          s[1] = std::max(s[1], std::fabs(if2_wald(*c.fam, c.theta, a, r, sigma, t)));
          s[2] = std::max(s[2], std::fabs(pif(*c.fam, c.theta, a, r, sigma, c.d, t)));
        }
        return s;
      };
      const std::string tag = std::string(c.fam->name()) + " alpha=" + num(a, 1);
      const char* names[] = {"IF", "IF2", "PIF"};
      if (a > 0) {
        const auto coarse = sups(mixed(1e6, bulk, 2000));
        const auto fine = sups(mixed(1e6, bulk, 8000));
        const auto tail = sups(grid(1e3, 1e6, 2000));
        for (int k = 0; k < 3; ++k) {
          const bool finite = std::isfinite(fine[k]);
          const double drift = std::fabs(coarse[k] - fine[k]) / fine[k];
          o.check(finite && drift < 1e-3 && tail[k] <= fine[k],
                  tag + " sup|" + names[k] + "| = " + num(fine[k]) + " (change under 4x refinement " + sci(drift) +
                      ", sup over [1e3, 1e6] " + num(tail[k]) + ")");
        }
      } else {
        const auto near = sups(grid(1e-8, 10.0, 2000));
        const auto far = sups({1e6});
        for (int k = 0; k < 3; ++k)
          o.check(far[k] > 1e3 * near[k], tag + " " + names[k] + " diverges: |value at 1e6| = " + sci(far[k]) +
                                               " vs sup on (0, 10] = " + sci(near[k]));
      }
    }
  }

  // Two-sample IF2 with the same contamination in both arms under the homogeneity null.
  double worst = 0;
  const Vec th = vec({2.0, 5.0});
  const auto hom = TwoSampleRestriction::homogeneity(2);
  for (double a : {0.5, 1.0}) {
    const Mat s = sigma_model(weibull_family(), th, a);
    for (double omega : {0.3, 0.5})
      for (double t : {0.01, 0.5, 2.0, 10.0, 1e4})
        worst = std::max(worst, std::fabs(if2_two_sample(weibull_family(), th, th, a, hom, s, s, omega, t, t)));
  }
  o.check(worst == 0.0, "two-sample IF2 under identical contamination: max |value| " + sci(worst));

  double wsum = 0;
  for (double s : {0.0, 1e-3, 0.5, 2.0, 10.0, 50.0, 300.0, 2000.0}) {
    double sum = 0;
    for (double v : dist::noncentral_weights(s)) sum += v;
    wsum = std::max(wsum, std::fabs(sum - 1));
  }
  o.check(wsum <= 1e-12, "sum of Poisson weights: max |sum - 1| " + sci(wsum));

  double werr = 0;
  for (double df : {1.0, 2.0, 3.0, 6.0})
    for (double ncp : {0.2, 2.0, 8.0, 25.0})
      for (double x : {0.5, 3.84, 9.0, 30.0}) {
        auto dens = [&](double y) {
          // Past z = 700 the Bessel factor overflows; the density there is below e^{-1000}.
          if (std::sqrt(ncp * y) > 700) return 0.0;
          return 0.5 * std::exp(-(y + ncp) / 2) * std::pow(y / ncp, df / 4 - 0.5) *
                 boost::math::cyl_bessel_i(df / 2 - 1, std::sqrt(ncp * y));
        };
        const double q =
            quad::integrate_half_line<1>([&](double s) { return std::array<double, 1>{dens(x + s)}; }, {1e-14, 1e-13, 45})[0];
        werr = std::max(werr, std::fabs(dist::noncentral_chi2_sf(x, df, ncp) - q));
      }
  o.check(werr <= 1e-8, "noncentral chi-square series vs quadrature: max abs difference " + sci(werr));
  return o;
}

// Population U for psi_a of Exp(mean 1), lifetimes Exp(1) and censoring Exp(mean 9). With
// lam = 10/9: 1 - G_Z(z) = exp(-lam z), dG_{Z,0} = exp(-lam z)/9 dz, dG_{Z,1} = exp(-lam z) dz,
// so gamma0(x) = exp(x/9), gamma(x) = (exp(lam x) - 1)/10 and phi gamma0 dG_{Z,1} = phi(z) e^{-z} dz.
struct PopulationU {
  double a;
  double c;
  double j;
  static constexpr double lam = 10.0 / 9.0;

  explicit PopulationU(double alpha) : a(alpha), c(1 + alpha), j(-alpha / ((1 + alpha) * (1 + alpha))) {}

  double phi(double z) const { return j - (z - 1) * std::exp(-a * z); }
  // int_0^x e^{bz} dz and int_0^x z e^{bz} dz
  static double e0(double b, double x) { return b == 0 ? x : std::expm1(b * x) / b; }
  static double e1(double b, double x) {
    return b == 0 ? 0.5 * x * x : std::exp(b * x) * (x / b - 1 / (b * b)) + 1 / (b * b);
  }
  // int_x^inf phi(w) e^{-w} dw
  double tail(double x) const { return j * std::exp(-x) - std::exp(-c * x) * (x / c + 1 / (c * c) - 1 / c); }
  double gamma(double x) const { return std::expm1(lam * x) / 10; }
  double gamma1(double x) const { return std::exp(lam * x) * tail(x); }
  // int_0^x phi(z) e^{-z} gamma(z) dz + gamma(x) tail(x)
  double gamma2(double x) const {
    const double b1 = lam - 1, b2 = lam - c;
    const double head = (j * (e0(b1, x) - e0(-1, x)) - (e1(b2, x) - e0(b2, x)) + (e1(-c, x) - e0(-c, x))) / 10;
    return head + gamma(x) * tail(x);
  }
  double u(double z, int delta) const {
    return (delta ? phi(z) * std::exp(z / 9) : gamma1(z)) - gamma2(z);
  }
};

Outcome criterion9() {
  Outcome o;
  const double alpha = 0.3;
  const PopulationU pop(alpha);

  // Self-check of the closed forms against direct quadrature.
  double cf = 0;
  for (double x : {0.1, 1.0, 3.0, 8.0}) {
    const double tq = quad::integrate_half_line<1>(
        [&](double s) { return std::array<double, 1>{pop.phi(x + s) * std::exp(-(x + s))}; }, {1e-14, 1e-13, 45})[0];
    const double hq = quad::integrate_scalar([&](double z) { return pop.phi(z) * std::exp(-z) * pop.gamma(z); }, 0.0, x,
                                             {1e-14, 1e-13, 45});
    cf = std::max({cf, std::fabs(tq - pop.tail(x)), std::fabs(hq + pop.gamma(x) * pop.tail(x) - pop.gamma2(x))});
  }
  o.check(cf < 1e-10, "oracle closed forms vs quadrature: " + sci(cf));

  std::mt19937_64 gen(99);
  std::exponential_distribution<double> life(1.0), cens(1.0 / 9.0);
  const std::size_t m = 2000000;
  double sum = 0, sum2 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = life(gen), cc = cens(gen);
    const double z = std::min(x, cc);
    const double u = pop.u(z, x <= cc ? 1 : 0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / static_cast<double>(m);
  const double c_oracle = sum2 / static_cast<double>(m);
  o.check(std::fabs(mean) < 5e-3, "oracle E[U] = " + sci(mean) + " (should vanish)");

  SyntheticDesign d;
  d.lifetime = {FamilyId::Exponential, vec({1.0})};
  d.censoring_mean = 9.0;
  d.seed = 31337;
  const CensoredSample sample = simulate(d, 2000, 0);
  FitConfig cfg;
  cfg.alpha = alpha;
  const FitResult f = fit(sample, exponential_family(), cfg);
  o.check(f.converged, "alpha=0.3 fit converged");
  const double ch = f.converged ? f.c_hat(0, 0) : NAN;
  const double rel = std::fabs(ch - c_oracle) / c_oracle;
  o.check(rel <= 0.10, "C-hat " + num(ch, 5) + " vs Monte Carlo oracle " + num(c_oracle, 5) + ": relative gap " +
                           num(100 * rel, 2) + "% (<= 10%)");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion,-c", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_option("--workers,-w", g_workers, "Monte Carlo worker threads");
  CLI11_PARSE(app, argc, argv);
  if (g_workers == 0) g_workers = std::max(1u, std::thread::hardware_concurrency());

  const std::vector<std::pair<const char*, std::function<Outcome()>>> all{
      {"Weibull(2, 5) levels and powers, clean data", criterion1},
      {"Weibull(2, 5) levels under 5% Exp(5) contamination", criterion2},
      {"variance ratio at n=200", criterion3},
      {"Exponential closed forms vs quadrature", criterion4},
      {"alpha=0 reduces to the MLE, KMPL to the ECDF", criterion5},
      {"null p-values are uniform", criterion6},
      {"veteran trial fits and one-sided tests", criterion7},
      {"influence function properties", criterion8},
      {"C-hat vs population oracle", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << all[i].first << "  ("
              << num(secs, 1) << " s)\n"
              << o.detail.str() << std::flush;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
