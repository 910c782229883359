#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace smlab {

struct QuadratureOptions {
    double abs_tol = 1e-9;
    double rel_tol = 0.0;
    std::size_t max_intervals = 400000;
    // Local angular frequency of the integrand; initial panels are no wider
    // than pi / (4 * frequency(x)).
    std::function<double(double)> frequency;
    double max_panel = std::numeric_limits<double>::infinity();
};

template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
};

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<std::complex<double>(double)>;

// Globally adaptive 7/15-point Gauss-Kronrod. Throws NumericalError when the
// tolerance is not met within max_intervals.
QuadratureResult<double> integrate(const RealFn& f, double a, double b,
                                   const QuadratureOptions& opt = {});
QuadratureResult<std::complex<double>> integrate(const ComplexFn& f, double a, double b,
                                                 const QuadratureOptions& opt = {});

// Integral over [a, inf). `envelope` bounds |f| and must eventually decrease;
// the range is cut where envelope(s) * max(s, 1) drops below abs_tol / 100.
QuadratureResult<double> integrate_to_infinity(const RealFn& f, double a, const RealFn& envelope,
                                               const QuadratureOptions& opt = {});
QuadratureResult<std::complex<double>> integrate_to_infinity(const ComplexFn& f, double a,
                                                             const RealFn& envelope,
                                                             const QuadratureOptions& opt = {});

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t n);

}  // namespace smlab
