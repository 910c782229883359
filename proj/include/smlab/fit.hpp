#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smlab {

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double residual_rms = 0.0;
    std::size_t n_points = 0;
};

// Least squares of log y on log x over samples with lo <= x <= hi.
// Throws ConfigError on an empty or degenerate window, fewer than 3 points,
// or a nonpositive y inside the window.
ExponentFit fit_power_law(std::span<const double> x, std::span<const double> y, double lo,
                          double hi);

struct LinearFit {
    std::vector<double> coef;
    double residual_rms = 0.0;
};

// Ordinary least squares y ~ sum_k coef[k] * columns[k].
LinearFit least_squares(const std::vector<std::vector<double>>& columns,
                        std::span<const double> y);

}  // namespace smlab
