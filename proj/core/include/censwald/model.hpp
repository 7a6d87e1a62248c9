#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "censwald/linalg.hpp"
#include "censwald/quadrature.hpp"

namespace censwald {

enum class FamilyId { Exponential, Weibull };

/// The alpha-weighted model integrals entering the MDPDE:
///   xi = int f^{1+a},  j = int u f^{1+a},  k = int u u^T f^{1+a}.
struct WeightedIntegrals {
  double xi = 0.0;
  Vec j;
  Mat k;
};

/// A parametric lifetime family on (0, inf).
///
/// Implementations are stateless; the shared instances returned by family() may be used
/// from any thread.
class Family {
 public:
  virtual ~Family() = default;

  virtual FamilyId id() const = 0;
  virtual std::string_view name() const = 0;
  virtual std::size_t dimension() const = 0;
  /// Canonical parameter names, e.g. {"scale", "shape"}.
  virtual std::vector<std::string> parameter_names() const = 0;

  /// Throws InvalidArgument unless theta lies in the parameter space.
  virtual void validate(const Vec& theta) const = 0;

  virtual double log_density(double x, const Vec& theta) const = 0;
  double density(double x, const Vec& theta) const;
  virtual double cdf(double x, const Vec& theta) const = 0;
  virtual double quantile(double p, const Vec& theta) const = 0;

  /// Gradient of log f_theta(x) with respect to theta. x must be positive.
  virtual Vec score(double x, const Vec& theta) const = 0;

  /// Typical magnitude of the lifetime, used to place quadrature on a log scale.
  virtual double scale(const Vec& theta) const = 0;

  /// Closed forms where the family has them, otherwise quadrature.
  virtual WeightedIntegrals weighted_integrals(const Vec& theta, double alpha,
                                               const quad::Options& opt = {}) const;
};

const Family& exponential_family();
const Family& weibull_family();
const Family& family(FamilyId id);
/// Accepts "exp", "exponential", "weibull" (case-insensitive).
const Family& family_by_name(std::string_view name);

/// Exponential with mean theta: F(x) = 1 - exp(-x / theta).
class ExponentialFamily final : public Family {
 public:
  FamilyId id() const override { return FamilyId::Exponential; }
  std::string_view name() const override { return "exponential"; }
  std::size_t dimension() const override { return 1; }
  std::vector<std::string> parameter_names() const override { return {"mean"}; }
  void validate(const Vec& theta) const override;
  double log_density(double x, const Vec& theta) const override;
  double cdf(double x, const Vec& theta) const override;
  double quantile(double p, const Vec& theta) const override;
  Vec score(double x, const Vec& theta) const override;
  double scale(const Vec& theta) const override { return theta[0]; }
  WeightedIntegrals weighted_integrals(const Vec& theta, double alpha,
                                       const quad::Options& opt = {}) const override;
};

/// Weibull with scale sigma and shape b: F(x) = 1 - exp(-(x / sigma)^b).
class WeibullFamily final : public Family {
 public:
  FamilyId id() const override { return FamilyId::Weibull; }
  std::string_view name() const override { return "weibull"; }
  std::size_t dimension() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return {"scale", "shape"}; }
  void validate(const Vec& theta) const override;
  double log_density(double x, const Vec& theta) const override;
  double cdf(double x, const Vec& theta) const override;
  double quantile(double p, const Vec& theta) const override;
  Vec score(double x, const Vec& theta) const override;
  double scale(const Vec& theta) const override { return theta[0]; }
  /// Quadrature in s = log((x / sigma)^b), where every integrand is smooth and decays
  /// double-exponentially on the right and exponentially on the left.
  WeightedIntegrals weighted_integrals(const Vec& theta, double alpha,
                                       const quad::Options& opt = {}) const override;
};

/// Family-agnostic quadrature for (xi, J, K) on x = scale * exp(s). Serves as the fallback
/// for families without closed forms and as the cross-check for those with them.
WeightedIntegrals weighted_integrals_quadrature(const Family& fam, const Vec& theta, double alpha,
                                                const quad::Options& opt = {});

/// MDPDE psi-function: psi_a(x; theta) = J_a(theta) - u_theta(x) f_theta(x)^a.
Vec mdpde_psi(const Family& fam, const Vec& theta, double alpha, double x);
/// Same, reusing a precomputed J_a(theta).
Vec mdpde_psi(const Family& fam, const Vec& theta, double alpha, double x, const Vec& j_alpha);

/// Lambda(psi_a; theta) = int d/dtheta psi_a dF_theta, which reduces to K_a(theta) at the model.
/// Throws NumericalError if the result is singular.
Mat lambda_model(const Family& fam, const Vec& theta, double alpha);

/// Sanity checks on a theta/alpha pair shared by the public entry points.
void check_alpha(double alpha);

}  // namespace censwald
