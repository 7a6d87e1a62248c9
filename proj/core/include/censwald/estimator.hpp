#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "censwald/data.hpp"
#include "censwald/kmpl.hpp"
#include "censwald/linalg.hpp"
#include "censwald/model.hpp"
#include "censwald/psi.hpp"
#include "censwald/varest.hpp"

namespace censwald {

struct FitConfig {
  double alpha = 0.0;
  std::optional<Vec> start;
  double tol_gradient = 1e-8;
  int max_iter = 200;
  /// Extra randomized starts after the deterministic one.
  int n_multistart = 5;
  std::uint64_t seed = 20240601;
  LambdaKind lambda_kind = LambdaKind::Model;
  bool compute_covariance = true;
  /// Tolerances for the model integrals evaluated inside the solver.
  quad::Options quadrature{1e-13, 1e-12, 40};

  void validate() const;
};

enum class FitMethod { Newton, SimplexThenNewton, Failed };
const char* to_string(FitMethod m) noexcept;

struct FitResult {
  FamilyId family = FamilyId::Exponential;
  std::size_t n = 0;
  double alpha = 0.0;
  Vec theta_hat;
  double objective_value = 0.0;
  /// Euclidean norm of J_a(theta) - int u f^a dG_X-hat at theta_hat.
  double eqn_residual = 0.0;
  bool converged = false;
  int iterations = 0;
  FitMethod method = FitMethod::Failed;

  Mat lambda_hat;
  Mat c_hat;
  Mat sigma_hat;
  double lambda_condition = 0.0;
  /// KMPL mass reassigned to the largest observation.
  double residual_mass = 0.0;
  /// Set when the fit failed with an exception inside fit_grid.
  std::string error;

  /// Standard errors sqrt(diag(sigma_hat) / n).
  Vec standard_errors() const;
};

/// The KMPL-weighted MDPDE problem for one sample, family and alpha.
///
/// Objective (alpha > 0): xi_a(theta) - ((1 + a) / a) int f^a dG_X-hat.
/// Objective (alpha = 0): -int log f dG_X-hat.
/// Its gradient is (1 + a) times estimating_equation().
class MdpdeProblem {
 public:
  MdpdeProblem(const CensoredSample& sample, const Family& fam, double alpha,
               const quad::Options& opt = FitConfig{}.quadrature);

  struct Value {
    double objective = 0.0;
    Vec equation;
  };

  /// Both quantities from one pass over the model integrals. Throws for theta outside the
  /// parameter space or non-finite densities at support points.
  Value evaluate(const Vec& theta) const;
  double objective(const Vec& theta) const { return evaluate(theta).objective; }
  Vec estimating_equation(const Vec& theta) const { return evaluate(theta).equation; }

  const Family& family() const noexcept { return *fam_; }
  double alpha() const noexcept { return alpha_; }
  const KmplFit& kmpl() const noexcept { return km_; }

 private:
  const Family* fam_;
  double alpha_;
  quad::Options opt_;
  KmplFit km_;
  std::vector<double> times_;
  std::vector<double> weights_;
};

double mdpde_objective(const CensoredSample& sample, const Family& fam, const Vec& theta, double alpha);
Vec estimating_equation(const CensoredSample& sample, const Family& fam, const Vec& theta, double alpha);

/// Exponential: total time over event count. Weibull: least squares line through the
/// log-log cumulative hazard of the KMPL estimate.
Vec initial_estimate(const CensoredSample& sample, const Family& fam);

/// MDPDE fit. Returns converged = false (rather than throwing) when no start converges.
/// Throws NumericalError when the fit converged but Lambda-hat is singular.
FitResult fit(const CensoredSample& sample, const Family& fam, const FitConfig& config);

/// Sequential fits over an ascending alpha grid, each warm-started from the previous
/// converged estimate. Exceptions are recorded per alpha and do not stop the sweep.
std::vector<FitResult> fit_grid(const CensoredSample& sample, const Family& fam,
                                std::span<const double> alpha_grid, const FitConfig& config);

/// Generic M-estimator: root of int psi(x; theta) dG_X-hat = 0 by damped Newton on the
/// squared residual, starting from `start`. Parameters must stay positive.
struct GenericSolution {
  Vec theta;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
};
GenericSolution solve_estimating_equation(const CensoredSample& sample, const PsiFunction& psi,
                                          const Vec& start, double tol = 1e-10, int max_iter = 200);

}  // namespace censwald
