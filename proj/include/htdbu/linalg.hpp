#pragma once

#include <Eigen/Dense>

namespace htdbu {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

double normal_cdf(double x);

// Standard normal quantile for p in (0, 1); returns -inf/+inf at 0/1.
// Rational approximation refined by one Halley step, ~1e-15 absolute.
double inv_normal_cdf(double p);

// Lower-triangular L with L L^T = a. Throws NotPSD when a pivot is not
// positive.
Matrix cholesky(const Matrix& a);

// Symmetric eigen-decomposition with eigenvalues raised to at least `floor`.
Matrix nearest_psd(const Matrix& a, double floor = 1e-6);

// nearest_psd followed by rescaling to a unit diagonal.
Matrix repair_correlation(const Matrix& a, double floor = 1e-6);

}  // namespace htdbu
