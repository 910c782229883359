#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "smlab/metric_space.hpp"

namespace smlab {

class SelfAdjointOperator;

// Kernel relative to mu: (Tf)(x) = sum_y K(x, y) f(y) mu(y). The imaginary
// plane is empty for real kernels.
struct OperatorKernel {
    SpacePtr space;
    Eigen::MatrixXd re;
    Eigen::MatrixXd im;

    bool is_real() const { return im.size() == 0; }
    std::size_t size() const { return static_cast<std::size_t>(re.rows()); }
    std::complex<double> operator()(std::size_t x, std::size_t y) const {
        const auto i = static_cast<Eigen::Index>(x), j = static_cast<Eigen::Index>(y);
        return {re(i, j), is_real() ? 0.0 : im(i, j)};
    }
    const double* im_data() const { return is_real() ? nullptr : im.data(); }

    static OperatorKernel identity(SpacePtr space);
    // K(x, y) = A_xy / mu(y) from a coefficient table A.
    static OperatorKernel from_table(SpacePtr space, const Eigen::MatrixXd& table);
    // mu-adjoint: K*(x, y) = conj(K(y, x)).
    OperatorKernel adjoint() const;
    // Kernel of the composition this * other.
    OperatorKernel compose(const OperatorKernel& other) const;
    double max_abs() const;
};

double norm_1to1(const OperatorKernel& k);
double norm_infinf(const OperatorKernel& k);
double norm_2toinf(const OperatorKernel& k);
double norm_2to2(const OperatorKernel& k);
// sup_x V(x, t)^{1/2} (sum_y |K(x, y)|^2 mu(y))^{1/2}
double weighted_2toinf(const OperatorKernel& k, double t);
// Same with caller-supplied weights V(x).
double weighted_2toinf(const OperatorKernel& k, const std::vector<double>& v);

struct NormInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
};

struct PNormOptions {
    std::uint64_t seed = 1;
    std::size_t random_vectors = 16;
    std::size_t power_iterations = 50;
};

// Exact for p in {1, 2, inf}. Otherwise the upper value is the Riesz-Thorin
// bound through the p = 2 endpoint and the lower value the best of
// |Tf|_p / |f|_p over point masses, constants, column phase patterns,
// seeded Gaussian vectors, and a p-norm power iteration from the best of those.
NormInterval norm_ptop(const OperatorKernel& k, double p, const PNormOptions& options = {});

struct BallPair {
    std::size_t center1 = 0;
    double radius1 = 0.0;
    std::size_t center2 = 0;
    double radius2 = 0.0;
};

struct DaviesGaffneyRow {
    std::size_t pair = 0;
    double r = 0.0;  // ball separation in the speed-rescaled metric
    double norm = 0.0;
    double ratio = 0.0;
};

struct DaviesGaffneyResult {
    double worst_ratio = 0.0;
    std::vector<DaviesGaffneyRow> rows;
};

// ||1_{B2} e^{-tL} 1_{B1}||_{2->2} / exp(-r^2 / 4t) with r measured in the
// metric divided by `speed`.
DaviesGaffneyResult davies_gaffney_pairs(const SelfAdjointOperator& op, double t,
                                         const std::vector<BallPair>& pairs, double speed);

}  // namespace smlab
