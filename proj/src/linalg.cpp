#include "smlab/linalg.hpp"

#include <lapacke.h>

#include <string>

#include "smlab/error.hpp"

namespace smlab {

void symmetric_eigen(Eigen::MatrixXd& a, Eigen::VectorXd& w, bool values_only) {
    const auto n = static_cast<lapack_int>(a.rows());
    if (a.rows() != a.cols()) throw NumericalError("symmetric_eigen: matrix is not square");
    w.resize(a.rows());
    if (n == 0) return;
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, values_only ? 'N' : 'V', 'L', n,
                                           a.data(), n, w.data());
    if (info != 0)
        throw NumericalError("eigensolver did not converge (dsyevd info " + std::to_string(info) + ")");
}

}  // namespace smlab
