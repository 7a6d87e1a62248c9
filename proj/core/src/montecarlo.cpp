#include "censwald/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "censwald/error.hpp"

namespace censwald {

namespace {

constexpr double kMaxFailureShare = 0.02;

struct Outcome {
  // Indexed by alpha.
  std::vector<ReplicationEstimate> estimates;
};

ReplicationEstimate default_estimate(const ExperimentSpec& spec, const CensoredSample& sample, double alpha) {
  FitConfig cfg = spec.fit;
  cfg.alpha = alpha;
  cfg.compute_covariance = true;
  ReplicationEstimate e;
  try {
    const FitResult r = fit(sample, family(spec.fit_family), cfg);
    if (!r.converged) return e;
    e.theta = r.theta_hat;
    e.sigma = r.sigma_hat;
    e.ok = e.theta.allFinite() && e.sigma.allFinite();
  } catch (const Error&) {
    e.ok = false;
  }
  return e;
}

std::vector<Outcome> simulate_all(const ExperimentSpec& spec) {
  std::vector<Outcome> out(spec.replications);
  parallel_for(spec.replications, spec.workers, [&](std::size_t rep) {
    const CensoredSample sample = simulate(spec.design, spec.n, rep);
    Outcome& o = out[rep];
    o.estimates.reserve(spec.alpha_grid.size());
    for (double a : spec.alpha_grid) {
      ReplicationEstimate e;
      if (spec.estimator) {
        try {
          e = spec.estimator(sample, a);
        } catch (const Error&) {
          e.ok = false;
        }
      } else {
        e = default_estimate(spec, sample, a);
      }
      o.estimates.push_back(std::move(e));
    }
  });
  return out;
}

ExperimentReport blank_report(const ExperimentSpec& spec) {
  ExperimentReport rep;
  rep.kind = spec.kind;
  rep.seed = spec.design.seed;
  rep.n = spec.n;
  rep.replications = spec.replications;
  rep.level = spec.level;
  rep.design_summary = describe(spec.design);
  rep.alpha_grid = spec.alpha_grid;
  rep.failures.assign(spec.alpha_grid.size(), 0);
  return rep;
}

void finish(ExperimentReport& rep, std::chrono::steady_clock::time_point start) {
  for (std::size_t f : rep.failures)
    if (static_cast<double>(f) > kMaxFailureShare * static_cast<double>(rep.replications)) rep.valid = false;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void fill_estimation(const ExperimentSpec& spec, const std::vector<Outcome>& outcomes, ExperimentReport& rep) {
  const Vec& truth = spec.design.lifetime.theta;
  const auto names = family(spec.fit_family).parameter_names();
  for (std::size_t ai = 0; ai < spec.alpha_grid.size(); ++ai) {
    for (Eigen::Index j = 0; j < truth.size(); ++j) {
      EstimationRow row;
      row.alpha = spec.alpha_grid[ai];
      row.component = static_cast<std::size_t>(j);
      row.parameter = static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)] : "theta";
      double sum_est = 0.0, sum_sq = 0.0, sum_var = 0.0;
      for (const Outcome& o : outcomes) {
        const auto& e = o.estimates[ai];
        if (!e.ok) continue;
        ++row.valid;
        const double err = e.theta[j] - truth[j];
        sum_est += e.theta[j];
        sum_sq += err * err;
        if (e.sigma.size() > 0) sum_var += e.sigma(j, j) / static_cast<double>(spec.n);
      }
      if (row.valid > 0) {
        const double v = static_cast<double>(row.valid);
        row.mean_estimate = sum_est / v;
        row.mse = sum_sq / v;
        row.mean_variance = sum_var / v;
        row.ratio = row.mse > 0.0 ? row.mean_variance / row.mse : 0.0;
      }
      rep.estimates.push_back(row);
    }
  }
  for (std::size_t ai = 0; ai < spec.alpha_grid.size(); ++ai)
    for (const Outcome& o : outcomes)
      if (!o.estimates[ai].ok) ++rep.failures[ai];
}

void write_double(std::ostream& out, double v) {
  if (std::isfinite(v)) {
    out << v;
  } else {
    out << (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
  }
}

}  // namespace

const char* to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::Mse:
      return "mse";
    case ExperimentKind::VarianceRatio:
      return "variance_ratio";
    case ExperimentKind::LevelPower:
      break;
  }
  return "level_power";
}

void ExperimentSpec::validate() const {
  design.validate();
  if (replications < 1) throw InvalidArgument("experiment: replications must be at least 1");
  if (n < 2) throw InvalidArgument("experiment: n must be at least 2");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("experiment: level must lie in (0, 1)");
  if (alpha_grid.empty()) throw InvalidArgument("experiment: alpha grid is empty");
  for (double a : alpha_grid) check_alpha(a);
  if (workers < 1) throw InvalidArgument("experiment: workers must be at least 1");
  if (kind == ExperimentKind::LevelPower && hypotheses.empty())
    throw InvalidArgument("experiment: level/power runs need at least one hypothesis");
  const std::size_t p = family(fit_family).dimension();
  for (const auto& h : hypotheses)
    if (h.p != p) throw InvalidArgument("experiment: hypothesis dimension does not match the fitted family");
  if ((kind != ExperimentKind::LevelPower) && design.lifetime.family != fit_family && !estimator)
    throw InvalidArgument("experiment: MSE needs the fitted family to match the lifetime family");
}

std::size_t ExperimentReport::total_failures() const {
  std::size_t s = 0;
  for (std::size_t f : failures) s += f;
  return s;
}

void ExperimentReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  out << "# kind=" << to_string(kind) << " seed=" << seed << " n=" << n << " replications=" << replications
      << " level=" << level << " valid=" << (valid ? 1 : 0) << "\n# design: " << design_summary << '\n';
  if (kind == ExperimentKind::LevelPower) {
    out << "alpha,hypothesis,rejections,valid,rate,std_error,failures\n";
    for (const auto& r : rejections) {
      const auto ai = static_cast<std::size_t>(
          std::find(alpha_grid.begin(), alpha_grid.end(), r.alpha) - alpha_grid.begin());
      out << r.alpha << ",\"" << r.hypothesis << "\"," << r.rejections << ',' << r.valid << ',' << r.rate << ','
          << r.std_error << ',' << failures[ai] << '\n';
    }
  } else {
    out << "alpha,component,parameter,valid,mean_estimate,mse,mean_variance,ratio,failures\n";
    for (const auto& r : estimates) {
      const auto ai = static_cast<std::size_t>(
          std::find(alpha_grid.begin(), alpha_grid.end(), r.alpha) - alpha_grid.begin());
      out << r.alpha << ',' << r.component << ',' << r.parameter << ',' << r.valid << ',';
      write_double(out, r.mean_estimate);
      out << ',';
      write_double(out, r.mse);
      out << ',';
      write_double(out, r.mean_variance);
      out << ',';
      write_double(out, r.ratio);
      out << ',' << failures[ai] << '\n';
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

void ExperimentReport::write_summary(std::ostream& out) const {
  out << to_string(kind) << ": n=" << n << ", replications=" << replications << ", seed=" << seed << '\n'
      << "design: " << design_summary << '\n';
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(4);
  if (kind == ExperimentKind::LevelPower) {
    for (const auto& r : rejections)
      out << "  alpha=" << r.alpha << "  " << r.hypothesis << "  rate=" << r.rate << " (se " << r.std_error << ", "
          << r.valid << " valid)\n";
  } else {
    for (const auto& r : estimates)
      out << "  alpha=" << r.alpha << "  " << r.parameter << "  mse=" << r.mse << "  var/n=" << r.mean_variance
          << "  ratio=" << r.ratio << '\n';
  }
  out.flags(flags);
  out << "failed fits: " << total_failures() << (valid ? "" : "  [INVALID: failure share above 2%]") << '\n'
      << "wall time: " << std::setprecision(3) << wall_seconds << " s\n";
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
        stop = true;
      }
    }
  };
  const unsigned k = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  {
    std::vector<std::jthread> pool;
    pool.reserve(k);
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(body);
  }
  if (first) std::rethrow_exception(first);
}

ExperimentReport run_level_power(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto outcomes = simulate_all(spec);
  ExperimentReport rep = blank_report(spec);
  for (std::size_t ai = 0; ai < spec.alpha_grid.size(); ++ai) {
    // A replication fails for this alpha when the fit or any of its tests fails.
    std::vector<std::vector<double>> p(spec.hypotheses.size());
    std::vector<std::vector<int>> rej(spec.hypotheses.size());
    for (const Outcome& o : outcomes) {
      const auto& e = o.estimates[ai];
      bool ok = e.ok;
      std::vector<TestReport> tests;
      if (ok) {
        try {
          for (const auto& h : spec.hypotheses) tests.push_back(wald_statistic(e.theta, e.sigma, spec.n, h, spec.level));
        } catch (const Error&) {
          ok = false;
        }
      }
      if (!ok) {
        ++rep.failures[ai];
        continue;
      }
      for (std::size_t h = 0; h < tests.size(); ++h) {
        p[h].push_back(tests[h].p_value);
        rej[h].push_back(tests[h].reject ? 1 : 0);
      }
    }
    for (std::size_t h = 0; h < spec.hypotheses.size(); ++h) {
      RejectionRow row;
      row.alpha = spec.alpha_grid[ai];
      row.hypothesis = spec.hypotheses[h].description;
      row.valid = rej[h].size();
      for (int r : rej[h]) row.rejections += static_cast<std::size_t>(r);
      if (row.valid > 0) {
        row.rate = static_cast<double>(row.rejections) / static_cast<double>(row.valid);
        row.std_error = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(row.valid));
      }
      if (spec.keep_p_values) row.p_values = std::move(p[h]);
      rep.rejections.push_back(std::move(row));
    }
  }
  finish(rep, start);
  return rep;
}

ExperimentReport run_mse(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentSpec s = spec;
  s.kind = ExperimentKind::Mse;
  const auto outcomes = simulate_all(s);
  ExperimentReport rep = blank_report(s);
  fill_estimation(s, outcomes, rep);
  finish(rep, start);
  return rep;
}

ExperimentReport run_variance_ratio(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentSpec s = spec;
  s.kind = ExperimentKind::VarianceRatio;
  const auto outcomes = simulate_all(s);
  ExperimentReport rep = blank_report(s);
  fill_estimation(s, outcomes, rep);
  finish(rep, start);
  return rep;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::Mse:
      return run_mse(spec);
    case ExperimentKind::VarianceRatio:
      return run_variance_ratio(spec);
    case ExperimentKind::LevelPower:
      break;
  }
  return run_level_power(spec);
}

std::string describe(const SyntheticDesign& design) {
  std::ostringstream os;
  os << std::setprecision(6);
  auto model = [&](const LifetimeModel& m) {
    os << family(m.family).name() << '(';
    for (Eigen::Index j = 0; j < m.theta.size(); ++j) os << (j ? "," : "") << m.theta[j];
    os << ')';
  };
  model(design.lifetime);
  os << ", censoring exponential(mean " << design.censoring_mean << ")";
  if (design.contamination_fraction > 0.0) {
    os << ", contamination " << design.contamination_fraction << " from ";
    model(design.contamination);
  }
  return os.str();
}

}  // namespace censwald
