#include "censwald/linalg.hpp"

#include <cmath>
#include <limits>

#include "censwald/error.hpp"

namespace censwald {

double condition_number(const Mat& a) {
  if (a.rows() != a.cols() || a.size() == 0) return std::numeric_limits<double>::infinity();
  if (!a.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return sv[0] / smin;
}

Mat checked_inverse(const Mat& a, const char* what, double max_condition) {
  if (a.rows() != a.cols()) throw InvalidArgument(std::string(what) + " is not square");
  const double cond = condition_number(a);
  if (!(cond < max_condition)) {
    throw NumericalError(std::string(what) + " is singular (condition number " + std::to_string(cond) + ")");
  }
  return a.inverse();
}

bool is_psd(const Mat& a, double jitter) {
  if (a.rows() != a.cols() || !a.allFinite()) return false;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + a.cwiseAbs().maxCoeff())) return false;
  const double bump = jitter * std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
  Eigen::LLT<Mat> llt(symmetrize(a) + bump * Mat::Identity(a.rows(), a.cols()));
  return llt.info() == Eigen::Success;
}

}  // namespace censwald
