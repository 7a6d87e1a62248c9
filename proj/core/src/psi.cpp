#include "censwald/psi.hpp"

#include "censwald/error.hpp"

namespace censwald {

Vec PsiFunction::evaluate(double x, const Vec& theta) const {
  const double xs[1] = {x};
  return evaluate(std::span<const double>(xs, 1), theta).row(0).transpose();
}

MdpdePsi::MdpdePsi(const Family& fam, double alpha) : fam_(&fam), alpha_(alpha) { check_alpha(alpha); }

Mat MdpdePsi::evaluate(std::span<const double> xs, const Vec& theta) const {
  const Vec j = fam_->weighted_integrals(theta, alpha_).j;
  Mat out(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(fam_->dimension()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = mdpde_psi(*fam_, theta, alpha_, xs[i], j).transpose();
  }
  return out;
}

Mat CallablePsi::evaluate(std::span<const double> xs, const Vec& theta) const {
  Mat out(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Vec v = fn_(xs[i], theta);
    if (static_cast<std::size_t>(v.size()) != dim_) throw InvalidArgument("psi returned a vector of wrong size");
    out.row(static_cast<Eigen::Index>(i)) = v.transpose();
  }
  return out;
}

}  // namespace censwald
