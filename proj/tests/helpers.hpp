#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <vector>

#include "smlab/metric_space.hpp"
#include "smlab/operators.hpp"

namespace smlab::test {

inline SpacePtr grid(int dim, int side, double h = 1.0, Boundary b = Boundary::free) {
    return std::make_shared<const MetricMeasureSpace>(build_grid(dim, side, h, b));
}

// Weighted graph on 6 points with uneven conductances, lengths and masses.
inline SpacePtr weighted_space() {
    std::vector<double> mu{1.0, 2.0, 0.5, 1.5, 3.0, 0.75};
    std::vector<Edge> edges{{0, 1, 1.0, 1.0}, {1, 2, 2.5, 0.5}, {2, 3, 0.7, 2.0},
                            {3, 4, 1.3, 1.0}, {4, 5, 0.4, 1.5}, {5, 0, 1.1, 1.0},
                            {1, 4, 0.9, 2.5}};
    return std::make_shared<const MetricMeasureSpace>(MetricMeasureSpace(mu, edges, {0}));
}

// Dense matrix M of the operator: (Lf)(x) = sum_y M(x, y) f(y).
inline Eigen::MatrixXd operator_matrix(const SelfAdjointOperator& op) {
    const std::size_t n = op.size();
    Eigen::MatrixXd m(n, n);
    std::vector<double> e(n), col(n);
    for (std::size_t y = 0; y < n; ++y) {
        std::fill(e.begin(), e.end(), 0.0);
        e[y] = 1.0;
        op.apply(e, col);
        for (std::size_t x = 0; x < n; ++x) m(x, y) = col[x];
    }
    return m;
}

// Kernel relative to mu of the matrix M: K(x, y) = M(x, y) / mu(y).
template <class Mat>
Mat to_kernel(const Mat& m, const MetricMeasureSpace& s) {
    Mat k = m;
    for (Eigen::Index y = 0; y < k.cols(); ++y) k.col(y) /= s.mu(static_cast<std::size_t>(y));
    return k;
}

// exp(A) by scaling and squaring a 40-term Taylor series.
inline Eigen::MatrixXd taylor_exp(const Eigen::MatrixXd& a) {
    int squarings = 0;
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > 0.5) {
        norm /= 2.0;
        ++squarings;
    }
    const Eigen::MatrixXd b = a / std::ldexp(1.0, squarings);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 40; ++k) {
        term = term * b / double(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace smlab::test
