#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "censwald/linalg.hpp"
#include "censwald/model.hpp"

namespace censwald {

/// The psi-function of an M-estimator, psi(x; theta) in R^p.
class PsiFunction {
 public:
  virtual ~PsiFunction() = default;
  virtual std::size_t dimension() const = 0;
  /// psi at every point of `xs`; row i holds psi(xs[i]; theta).
  virtual Mat evaluate(std::span<const double> xs, const Vec& theta) const = 0;

  Vec evaluate(double x, const Vec& theta) const;
};

/// psi_alpha of the minimum density power divergence estimator for `fam`.
class MdpdePsi final : public PsiFunction {
 public:
  MdpdePsi(const Family& fam, double alpha);

  std::size_t dimension() const override { return fam_->dimension(); }
  Mat evaluate(std::span<const double> xs, const Vec& theta) const override;
  using PsiFunction::evaluate;

  const Family& family() const noexcept { return *fam_; }
  double alpha() const noexcept { return alpha_; }

 private:
  const Family* fam_;
  double alpha_;
};

/// Adapts a callable x, theta -> psi (for hand-built M-estimators and tests).
class CallablePsi final : public PsiFunction {
 public:
  using Fn = std::function<Vec(double, const Vec&)>;
  CallablePsi(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

  std::size_t dimension() const override { return dim_; }
  Mat evaluate(std::span<const double> xs, const Vec& theta) const override;
  using PsiFunction::evaluate;

 private:
  std::size_t dim_;
  Fn fn_;
};

}  // namespace censwald
