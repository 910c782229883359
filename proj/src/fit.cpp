#include "smlab/fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "smlab/error.hpp"

namespace smlab {

ExponentFit fit_power_law(std::span<const double> x, std::span<const double> y, double lo,
                          double hi) {
    if (x.size() != y.size()) throw ConfigError("fit_power_law: x and y differ in length");
    if (!(lo < hi)) throw ConfigError("fit_power_law: empty window");
    const double slack = 1e-12 * std::max(std::fabs(lo), std::fabs(hi));
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo - slack || x[i] > hi + slack) continue;
        if (!(y[i] > 0.0) || !(x[i] > 0.0))
            throw ConfigError("fit_power_law: nonpositive sample at x=" + std::to_string(x[i]));
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    if (lx.size() < 3)
        throw ConfigError("fit_power_law: need at least 3 samples in window, got " +
                          std::to_string(lx.size()));
    const auto n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx <= 0.0) throw ConfigError("fit_power_law: all samples share one abscissa");
    ExponentFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (f.intercept + f.slope * lx[i]);
        ss += r * r;
    }
    f.residual_rms = std::sqrt(ss / n);
    f.window_lo = lo;
    f.window_hi = hi;
    f.n_points = lx.size();
    return f;
}

LinearFit least_squares(const std::vector<std::vector<double>>& columns, std::span<const double> y) {
    const auto rows = static_cast<Eigen::Index>(y.size());
    const auto cols = static_cast<Eigen::Index>(columns.size());
    if (cols == 0 || rows < cols) throw ConfigError("least_squares: underdetermined system");
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index k = 0; k < cols; ++k) {
        if (static_cast<Eigen::Index>(columns[k].size()) != rows)
            throw ConfigError("least_squares: column length mismatch");
        for (Eigen::Index i = 0; i < rows; ++i) a(i, k) = columns[k][i];
    }
    Eigen::Map<const Eigen::VectorXd> b(y.data(), rows);
    Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    LinearFit out;
    out.coef.assign(c.data(), c.data() + cols);
    out.residual_rms = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(rows));
    return out;
}

}  // namespace smlab
