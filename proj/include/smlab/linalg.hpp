#pragma once

#include <Eigen/Dense>

namespace smlab {

// Symmetric eigendecomposition through LAPACK dsyevd. On return `a` holds the
// orthonormal eigenvectors as columns (unless values_only) and `w` the
// eigenvalues in ascending order. Throws NumericalError on failure.
void symmetric_eigen(Eigen::MatrixXd& a, Eigen::VectorXd& w, bool values_only = false);

}  // namespace smlab
