#include "censwald/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "censwald/error.hpp"
#include "censwald/rng.hpp"

namespace censwald {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogStep = 1e-6;      // central-difference step in log-parameter space
constexpr double kMaxLogStep = 2.0;    // at most a factor e^2 per Newton step

struct State {
  Vec eta;
  Vec theta;
  double objective = kInf;
  Vec equation;
  Vec grad;  // theta .* equation: gradient of the objective in eta, over (1 + alpha)
  bool ok = false;
};

State evaluate_at(const MdpdeProblem& prob, const Vec& eta) {
  State s;
  s.eta = eta;
  s.theta = eta.array().exp().matrix();
  try {
    auto v = prob.evaluate(s.theta);
    if (!std::isfinite(v.objective) || !v.equation.allFinite()) return s;
    s.objective = v.objective;
    s.equation = std::move(v.equation);
    s.grad = s.theta.cwiseProduct(s.equation);
    s.ok = true;
  } catch (const Error&) {
  }
  return s;
}

struct RunOutcome {
  State state;
  bool converged = false;
  int iterations = 0;
};

// Modified Newton on the objective in eta = log(theta): Hessian by central differences of
// the analytic gradient, eigenvalues reflected to make the step a descent direction.
RunOutcome newton(const MdpdeProblem& prob, const Vec& eta0, double tol, int max_iter) {
  RunOutcome out;
  State cur = evaluate_at(prob, eta0);
  if (!cur.ok) {
    out.state = cur;
    return out;
  }
  const auto p = eta0.size();
  const double scale = 1.0 + prob.alpha();
  int it = 0;
  for (; it < max_iter; ++it) {
    if (cur.equation.norm() == 0.0) {
      out.converged = true;
      break;
    }
    Mat h(p, p);
    bool hess_ok = true;
    for (Eigen::Index j = 0; j < p && hess_ok; ++j) {
      Vec up = cur.eta;
      Vec down = cur.eta;
      up[j] += kLogStep;
      down[j] -= kLogStep;
      const State a = evaluate_at(prob, up);
      const State b = evaluate_at(prob, down);
      if (!a.ok || !b.ok) {
        hess_ok = false;
        break;
      }
      h.col(j) = (a.grad - b.grad) / (2.0 * kLogStep);
    }
    if (!hess_ok) break;
    Eigen::SelfAdjointEigenSolver<Mat> eig(symmetrize(h));
    Vec lam = eig.eigenvalues().cwiseAbs();
    const double floor = std::max(1e-12, 1e-10 * lam.maxCoeff());
    for (Eigen::Index k = 0; k < p; ++k) lam[k] = std::max(lam[k], floor);
    Vec d = -(eig.eigenvectors() * (eig.eigenvectors().transpose() * cur.grad).cwiseQuotient(lam));
    const double big = d.cwiseAbs().maxCoeff();
    if (big > kMaxLogStep) d *= kMaxLogStep / big;

    const double slope = scale * cur.grad.dot(d);
    const double res0 = cur.equation.norm();
    double t = 1.0;
    bool accepted = false;
    State next;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      next = evaluate_at(prob, cur.eta + t * d);
      if (!next.ok) continue;
      const bool armijo = next.objective <= cur.objective + 1e-4 * t * slope;
      const bool flat = next.objective <= cur.objective + 1e-13 * (1.0 + std::fabs(cur.objective)) &&
                        next.equation.norm() < res0;
      if (armijo || flat) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double step = t * d.cwiseAbs().maxCoeff();
    cur = std::move(next);
    if (cur.equation.norm() < tol && step < 1e-7) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.iterations = it;
  out.converged = out.converged || (cur.ok && cur.equation.norm() < tol);
  out.state = std::move(cur);
  return out;
}

// Nelder-Mead on the objective in eta. Returns the best vertex.
Vec nelder_mead(const MdpdeProblem& prob, const Vec& eta0, int max_evals) {
  const auto p = eta0.size();
  auto f = [&](const Vec& e) {
    const State s = evaluate_at(prob, e);
    return s.ok ? s.objective : kInf;
  };
  std::vector<Vec> x(static_cast<std::size_t>(p + 1), eta0);
  std::vector<double> fx(static_cast<std::size_t>(p + 1));
  for (Eigen::Index k = 0; k < p; ++k) x[static_cast<std::size_t>(k + 1)][k] += 0.3;
  int evals = 0;
  for (std::size_t k = 0; k < x.size(); ++k, ++evals) fx[k] = f(x[k]);

  std::vector<std::size_t> order(x.size());
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    double size = 0.0;
    for (const auto& v : x) size = std::max(size, (v - x[best]).cwiseAbs().maxCoeff());
    if (std::isfinite(fx[worst]) && fx[worst] - fx[best] <= 1e-14 * (1.0 + std::fabs(fx[best])) && size < 1e-9) {
      break;
    }
    Vec centroid = Vec::Zero(p);
    for (std::size_t k = 0; k < x.size(); ++k)
      if (k != worst) centroid += x[k];
    centroid /= static_cast<double>(p);

    const Vec xr = centroid + (centroid - x[worst]);
    const double fr = f(xr);
    ++evals;
    if (fr < fx[best]) {
      const Vec xe = centroid + 2.0 * (centroid - x[worst]);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        x[worst] = xe;
        fx[worst] = fe;
      } else {
        x[worst] = xr;
        fx[worst] = fr;
      }
      continue;
    }
    if (fr < fx[second]) {
      x[worst] = xr;
      fx[worst] = fr;
      continue;
    }
    const bool outside = fr < fx[worst];
    const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (x[worst] - centroid));
    const double fc = f(xc);
    ++evals;
    if (fc < (outside ? fr : fx[worst])) {
      x[worst] = xc;
      fx[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k == best) continue;
      x[k] = x[best] + 0.5 * (x[k] - x[best]);
      fx[k] = f(x[k]);
      ++evals;
    }
  }
  const auto it = std::min_element(fx.begin(), fx.end());
  return x[static_cast<std::size_t>(it - fx.begin())];
}

struct Candidate {
  RunOutcome run;
  FitMethod method = FitMethod::Failed;
};

Candidate solve_from(const MdpdeProblem& prob, const Vec& start, const FitConfig& cfg) {
  Candidate c;
  const Vec eta0 = start.array().log().matrix();
  c.run = newton(prob, eta0, cfg.tol_gradient, cfg.max_iter);
  if (c.run.converged) {
    c.method = FitMethod::Newton;
    return c;
  }
  const Vec eta_nm = nelder_mead(prob, eta0, 400 * static_cast<int>(eta0.size()));
  RunOutcome polished = newton(prob, eta_nm, cfg.tol_gradient, cfg.max_iter);
  polished.iterations += c.run.iterations;
  const bool better = polished.converged || !c.run.state.ok ||
                      (polished.state.ok && polished.state.objective < c.run.state.objective);
  if (better) c.run = std::move(polished);
  c.method = c.run.converged ? FitMethod::SimplexThenNewton : FitMethod::Failed;
  return c;
}

}  // namespace

void FitConfig::validate() const {
  check_alpha(alpha);
  if (!(tol_gradient > 0.0)) throw InvalidArgument("tol_gradient must be positive");
  if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
  if (n_multistart < 0) throw InvalidArgument("n_multistart must be nonnegative");
}

const char* to_string(FitMethod m) noexcept {
  switch (m) {
    case FitMethod::Newton:
      return "newton";
    case FitMethod::SimplexThenNewton:
      return "simplex+newton";
    case FitMethod::Failed:
      break;
  }
  return "failed";
}

Vec FitResult::standard_errors() const {
  if (sigma_hat.size() == 0 || n == 0) return {};
  return (sigma_hat.diagonal() / static_cast<double>(n)).cwiseMax(0.0).cwiseSqrt();
}

MdpdeProblem::MdpdeProblem(const CensoredSample& sample, const Family& fam, double alpha,
                           const quad::Options& opt)
    : fam_(&fam), alpha_(alpha), opt_(opt), km_(kmpl_fit(sample)) {
  check_alpha(alpha);
  times_ = km_.weighted_times();
  weights_ = km_.weights();
}

MdpdeProblem::Value MdpdeProblem::evaluate(const Vec& theta) const {
  fam_->validate(theta);
  const auto p = static_cast<Eigen::Index>(fam_->dimension());
  Value v;
  v.equation = Vec::Zero(p);
  if (alpha_ == 0.0) {
    double obj = 0.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
      const double lf = fam_->log_density(times_[i], theta);
      if (!std::isfinite(lf)) throw NumericalError("objective: density is not finite at a support point");
      obj -= weights_[i] * lf;
      v.equation -= weights_[i] * fam_->score(times_[i], theta);
    }
    v.objective = obj;
  } else {
    const WeightedIntegrals wi = fam_->weighted_integrals(theta, alpha_, opt_);
    double mass = 0.0;
    v.equation = wi.j;
    for (std::size_t i = 0; i < times_.size(); ++i) {
      const double fa = std::exp(alpha_ * fam_->log_density(times_[i], theta));
      if (!std::isfinite(fa)) throw NumericalError("objective: density is not finite at a support point");
      mass += weights_[i] * fa;
      v.equation -= weights_[i] * fa * fam_->score(times_[i], theta);
    }
    v.objective = wi.xi - (1.0 + alpha_) / alpha_ * mass;
  }
  if (!std::isfinite(v.objective) || !v.equation.allFinite())
    throw NumericalError("objective: non-finite value");
  return v;
}

double mdpde_objective(const CensoredSample& sample, const Family& fam, const Vec& theta, double alpha) {
  return MdpdeProblem(sample, fam, alpha).objective(theta);
}

Vec estimating_equation(const CensoredSample& sample, const Family& fam, const Vec& theta, double alpha) {
  return MdpdeProblem(sample, fam, alpha).estimating_equation(theta);
}

Vec initial_estimate(const CensoredSample& sample, const Family& fam) {
  double total = 0.0;
  for (double z : sample.times()) total += z;
  const double events = static_cast<double>(std::max<std::size_t>(sample.event_count(), 1));
  const double mean = std::max(total / events, 1e-300);
  if (fam.id() == FamilyId::Exponential) return Vec::Constant(1, mean);

  // log(-log S(t)) = b log t - b log sigma along the KMPL estimate.
  const KmplFit km = kmpl_fit(sample);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < km.support.size(); ++i) {
    const double s = 1.0 - km.cdf_values[i];
    const double t = km.support[i];
    if (!(s > 1e-12 && s < 1.0) || !(t > 0.0)) continue;
    const double x = std::log(t);
    const double y = std::log(-std::log(s));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  Vec theta(2);
  theta << mean, 1.0;
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
      const double b = (m * sxy - sx * sy) / denom;
      const double a = (sy - b * sx) / m;
      if (std::isfinite(b) && b > 0.0) {
        const double sigma = std::exp(-a / b);
        if (std::isfinite(sigma) && sigma > 0.0) theta << sigma, std::clamp(b, 0.05, 50.0);
      }
    }
  }
  return theta;
}

FitResult fit(const CensoredSample& sample, const Family& fam, const FitConfig& config) {
  config.validate();
  const MdpdeProblem prob(sample, fam, config.alpha, config.quadrature);
  const Vec start = config.start ? *config.start : initial_estimate(sample, fam);
  fam.validate(start);

  std::vector<Vec> starts{start};
  for (int k = 0; k < config.n_multistart; ++k) {
    auto rng = Xoshiro256::for_stream(config.seed, static_cast<std::uint64_t>(k));
    Vec s = start;
    for (Eigen::Index j = 0; j < s.size(); ++j) s[j] *= std::exp(1.4 * (rng.uniform() - 0.5));
    starts.push_back(std::move(s));
  }

  std::optional<Candidate> best;
  int iterations = 0;
  for (const Vec& s : starts) {
    Candidate c = solve_from(prob, s, config);
    iterations += c.run.iterations;
    if (!c.run.state.ok) continue;
    if (!best) {
      best = std::move(c);
      continue;
    }
    const bool take = c.run.converged != best->run.converged
                          ? c.run.converged
                          : c.run.state.objective < best->run.state.objective;
    if (take) best = std::move(c);
  }

  FitResult r;
  r.family = fam.id();
  r.n = sample.size();
  r.alpha = config.alpha;
  r.iterations = iterations;
  r.residual_mass = prob.kmpl().residual_mass;
  if (!best) {
    r.theta_hat = start;
    r.objective_value = kInf;
    r.eqn_residual = kInf;
    return r;
  }
  const State& st = best->run.state;
  r.theta_hat = st.theta;
  r.objective_value = st.objective;
  r.eqn_residual = st.equation.norm();
  r.converged = best->run.converged && r.eqn_residual < config.tol_gradient;
  r.method = r.converged ? best->method : FitMethod::Failed;
  if (r.converged && config.compute_covariance) {
    const CovarianceEstimate cov = estimate_covariance(sample, fam, r.theta_hat, config.alpha, config.lambda_kind);
    r.lambda_hat = cov.lambda_hat;
    r.c_hat = cov.c_hat;
    r.sigma_hat = cov.sigma_hat;
    r.lambda_condition = cov.lambda_condition;
  }
  return r;
}

std::vector<FitResult> fit_grid(const CensoredSample& sample, const Family& fam,
                                std::span<const double> alpha_grid, const FitConfig& config) {
  if (alpha_grid.empty()) throw InvalidArgument("alpha grid is empty");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    check_alpha(alpha_grid[i]);
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) throw InvalidArgument("alpha grid must be ascending");
  }
  std::vector<FitResult> out;
  out.reserve(alpha_grid.size());
  FitConfig cfg = config;
  for (double a : alpha_grid) {
    cfg.alpha = a;
    try {
      out.push_back(fit(sample, fam, cfg));
    } catch (const Error& e) {
      FitResult r;
      r.family = fam.id();
      r.n = sample.size();
      r.alpha = a;
      r.theta_hat = cfg.start ? *cfg.start : Vec();
      r.objective_value = kInf;
      r.eqn_residual = kInf;
      r.error = e.what();
      out.push_back(std::move(r));
    }
    if (out.back().converged) cfg.start = out.back().theta_hat;
  }
  return out;
}

GenericSolution solve_estimating_equation(const CensoredSample& sample, const PsiFunction& psi,
                                          const Vec& start, double tol, int max_iter) {
  if (static_cast<std::size_t>(start.size()) != psi.dimension())
    throw InvalidArgument("start has wrong dimension");
  if ((start.array() <= 0.0).any()) throw InvalidArgument("start must be positive");
  const KmplFit km = kmpl_fit(sample);
  const auto times = km.weighted_times();
  const auto w = km.weights();
  const Eigen::Map<const Vec> weights(w.data(), static_cast<Eigen::Index>(w.size()));
  auto g = [&](const Vec& eta, Vec& out) {
    try {
      out = psi.evaluate(times, eta.array().exp().matrix()).transpose() * weights;
      return out.allFinite();
    } catch (const Error&) {
      return false;
    }
  };

  GenericSolution sol;
  Vec eta = start.array().log().matrix();
  Vec val;
  if (!g(eta, val)) throw NumericalError("estimating equation is not finite at the start");
  const auto p = eta.size();
  int it = 0;
  for (; it < max_iter && val.norm() >= tol; ++it) {
    Mat jac(p, p);
    bool ok = true;
    for (Eigen::Index j = 0; j < p && ok; ++j) {
      Vec up = eta, down = eta, gu, gd;
      up[j] += kLogStep;
      down[j] -= kLogStep;
      ok = g(up, gu) && g(down, gd);
      if (ok) jac.col(j) = (gu - gd) / (2.0 * kLogStep);
    }
    if (!ok) break;
    Vec d = -jac.colPivHouseholderQr().solve(val);
    if (!d.allFinite()) break;
    const double big = d.cwiseAbs().maxCoeff();
    if (big > kMaxLogStep) d *= kMaxLogStep / big;
    double t = 1.0;
    bool accepted = false;
    Vec trial;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      if (g(eta + t * d, trial) && trial.norm() < (1.0 - 1e-4 * t) * val.norm()) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    eta += t * d;
    val = trial;
  }
  sol.theta = eta.array().exp().matrix();
  sol.residual = val.norm();
  sol.converged = sol.residual < tol;
  sol.iterations = it;
  return sol;
}

}  // namespace censwald
