#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "smlab/multiplier.hpp"
#include "smlab/norms.hpp"
#include "smlab/operators.hpp"

namespace smlab {

// Kernel sum_i f_i u_i(x) u_i(y) for a value per eigenpair.
OperatorKernel kernel_from_spectrum(const SelfAdjointOperator& op,
                                    const std::vector<std::complex<double>>& f);

// Kernel of F(tL). NumericalError when F is not finite at some t*lambda_i.
OperatorKernel apply_multiplier(const SelfAdjointOperator& op, const MultiplierFunction& f,
                                double t = 1.0);

OperatorKernel heat_kernel(const SelfAdjointOperator& op, double t);

// int_0^inf F_a(sqrt(s) xi) s^{a+1/2} e^{-s/4} ds
double subordination_integral(double a, double xi, double quad_tol = 1e-9);
// max over xi of |subordination_integral - exp(-xi^2)|
double subordination_check(double a, const std::vector<double>& xi_grid, double quad_tol = 1e-9,
                           int jobs = 1);

// Right side of the rewrite of e^{i xi t lambda} e^{-t lambda} through F_a,
// evaluated by quadrature for one eigenvalue.
std::complex<double> wave_rewrite_value(double lambda, double t, double xi, double a,
                                        double quad_tol = 1e-9);
// max over the spectrum of |quadrature - e^{i xi t lambda} e^{-t lambda}|
double wave_rewrite_check(const SelfAdjointOperator& op, double t, double xi, double a,
                          double quad_tol = 1e-9, int jobs = 1);

struct SobolevOptions {
    double initial_cutoff = 32.0;   // first frequency cutoff Xi
    double max_cutoff = 4096.0;     // refinement stops here with NumericalError
    double rel_tol = 1e-4;          // agreement of two successive resolutions
};

// (1/2pi int (1+xi^2)^s |F^(xi)|^2 dxi)^{1/2}, F^(xi) = int F(l) e^{-i l xi} dl
// over the line extension of F.
double sobolev_norm(const MultiplierFunction& f, double s, const SobolevOptions& options = {});

struct HormanderOptions {
    double lambda_max = 1e4;        // right end of the sampled range
    std::size_t low_samples = 200;  // on [0, 1)
    std::size_t per_decade = 40;    // on [1, lambda_max]
    double growth_factor = 2.0;     // allowed outer/inner ratio of the weighted sup
};

struct HormanderResult {
    bool pass = false;
    double constant = 0.0;
    int m_max = 0;
    std::vector<double> low_sup;     // per m, sup over [0, 1) of |F^(m)|
    std::vector<double> high_sup;    // per m, sup over [1, lambda_max] of |l^{m+eps} F^(m)|
    std::vector<double> growth;      // per m, outer-decade sup / inner sup
};

// Numerical derivative of the line extension (4th-order central stencil).
std::complex<double> numerical_derivative(const MultiplierFunction& f, int m, double lambda);

HormanderResult hormander_check(const MultiplierFunction& f, double sigma, double kappa, double eps,
                                const HormanderOptions& options = {});

struct PropagationOptions {
    std::optional<double> v_max;  // default: 10 x CFL estimate
};

double cfl_speed(const MetricMeasureSpace& space);

double propagation_speed(const SelfAdjointOperator& op, const std::vector<double>& tau_grid,
                         double mass_tol, const PropagationOptions& options = {});

// Largest per-column fraction of 1->1 mass of F(r sqrt(L) / B) carried by
// pairs with d(x, y) / speed > r (1 + slack).
double locality_check(const SelfAdjointOperator& op, const MultiplierFunction& f, double r,
                      double slack, double speed);

enum class ResolventPath { spectral, quadrature };

// (1 + t^2 lambda)^{-sigma} by its Gamma integral of heat multipliers.
double resolvent_power_quadrature(double lambda, double t, double sigma, double quad_tol = 1e-12);
OperatorKernel resolvent_power(const SelfAdjointOperator& op, double t, double sigma,
                               ResolventPath path = ResolventPath::spectral);

// (z^2 + lambda)^{-1} by the contour formula for z = r e^{i theta}.
std::complex<double> complex_resolvent_quadrature(double lambda, std::complex<double> z,
                                                  double quad_tol = 1e-12);
OperatorKernel complex_time_resolvent(const SelfAdjointOperator& op, std::complex<double> z);
double complex_resolvent_formula_check(const SelfAdjointOperator& op, std::complex<double> z);

}  // namespace smlab
