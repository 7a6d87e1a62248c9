#pragma once

#include <Eigen/Dense>

namespace censwald {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Reciprocal-free 2-norm condition number of a square matrix (inf when singular).
double condition_number(const Mat& a);

/// Inverse of a square matrix; throws NumericalError when it is singular or ill-conditioned
/// beyond `max_condition`. `what` names the matrix in the error message.
Mat checked_inverse(const Mat& a, const char* what, double max_condition = 1e14);

/// (A + A^T) / 2
inline Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

/// True when A is symmetric PSD: Cholesky of A + jitter*I succeeds.
bool is_psd(const Mat& a, double jitter = 1e-12);

}  // namespace censwald
