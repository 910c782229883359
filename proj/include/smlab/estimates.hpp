#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smlab/calculus.hpp"
#include "smlab/fit.hpp"
#include "smlab/multiplier.hpp"
#include "smlab/norms.hpp"
#include "smlab/operators.hpp"

namespace smlab {

struct KeyResult {
    std::string name;
    double predicted = 0.0;
    double fitted = 0.0;
};

// Output of one verification suite. The table, parameters, measurements and
// tolerances are the inputs of the suite's judge, which derives fits,
// constants, summary, notes and the pass flag; reevaluate() reruns it.
struct SuiteReport {
    std::string suite;
    std::map<std::string, double> parameters;
    std::map<std::string, double> measurements;
    std::map<std::string, double> tolerances;
    std::map<std::string, std::string> labels;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> table;

    std::map<std::string, ExponentFit> fits;
    std::map<std::string, double> constants;
    std::vector<KeyResult> summary;
    std::vector<std::string> notes;
    bool pass = false;

    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
    double parameter(const std::string& name) const;
    double tolerance(const std::string& name) const;
    double measurement(const std::string& name) const;
};

// Recomputes the derived fields of a stored report from its inputs.
SuiteReport reevaluate(const SuiteReport& stored);

const std::vector<std::string>& suite_names();

// Suites take tolerances that override the defaults by name.
using Tolerances = std::map<std::string, double>;

struct RskOptions {
    double sigma = 1.5;
    double kappa = 0.25;  // predicted exponent
    // Fit window in t; defaults to [shortest edge, diameter / 4], between the
    // lattice scale and finite-volume saturation.
    std::optional<double> window_lo;
    std::optional<double> window_hi;
    Tolerances tolerances;
};
SuiteReport suite_rsk(const SelfAdjointOperator& op, const std::vector<double>& t_grid,
                      const RskOptions& options, int jobs = 1);

struct Heat2InfOptions {
    double kappa = 0.25;
    std::optional<double> window_lo;  // as for RskOptions
    std::optional<double> window_hi;
    // When positive, the resolvent form with this sigma is tabulated too and
    // the two fitted exponents are compared (required on doubling spaces).
    double sigma = 0.0;
    bool doubling = false;
    Tolerances tolerances;
};
SuiteReport suite_heat2inf(const SelfAdjointOperator& op, const std::vector<double>& t_grid,
                           const Heat2InfOptions& options, int jobs = 1);

struct OnDiagOptions {
    double n = 3.0;
    double m = 4.0;
    Interval small_window{1.5, 4.0};
    Interval large_window{6.4, 12.5};
    Tolerances tolerances;
};
SuiteReport suite_ondiag(const SelfAdjointOperator& op, const std::vector<double>& t_grid,
                         const OnDiagOptions& options);

struct WaveOptions {
    double sigma = 1.5;
    double kappa = 0.25;
    double xi_fit_min = 1.0;  // xi-slopes use xi >= this
    Tolerances tolerances;
};
SuiteReport suite_wave(const SelfAdjointOperator& op, const std::vector<double>& xi_grid,
                       const std::vector<double>& t_grid, const WaveOptions& options, int jobs = 1);

struct MultiplierSuiteOptions {
    double s = 5.0;
    double sigma = 1.5;
    double kappa = 0.25;
    int dyadic_levels = 0;  // when positive, per-piece norms at t = 1 are reported
    Tolerances tolerances;
};
// F(tL) on a model and on a larger version of it.
SuiteReport suite_multiplier(const SelfAdjointOperator& op, const SelfAdjointOperator& op_large,
                             const MultiplierFunction& f, const std::vector<double>& t_grid,
                             const MultiplierSuiteOptions& options, int jobs = 1);

struct SectorOptions {
    double sigma = 1.0;
    double kappa = 0.0;
    Tolerances tolerances;
};
// Samples are run on two mesh sizes of the same geometry.
SuiteReport suite_resolvent_sector(const SelfAdjointOperator& coarse, const SelfAdjointOperator& fine,
                                   const std::vector<std::complex<double>>& z_samples,
                                   const SectorOptions& options, int jobs = 1);
// Polar grid r e^{i theta}.
std::vector<std::complex<double>> sector_samples(const std::vector<double>& radii,
                                                 const std::vector<double>& angles);

struct SpectrumProbeOptions {
    double sigma = 1.0;
    double kappa = 0.0;
    double eps = 1.0;
    Tolerances tolerances;
};
// g(lambda) = (1 - psi(lambda)) / (rho - lambda) with psi = 1 near rho.
MultiplierFunction spectrum_probe_function(double rho, double gap);
SuiteReport suite_spectrum_probe(const SelfAdjointOperator& op, double rho, double gap,
                                 const SpectrumProbeOptions& options);

struct SchrodingerSuiteOptions {
    double alpha = 0.2;
    double n = 3.0;
    double eps = 0.1;  // subcriticality check
    Interval window{1.0, 8.0};
    Tolerances tolerances;
};
// op carries the potential; reference is the same space without it.
SuiteReport suite_schrodinger(const SelfAdjointOperator& op, const SelfAdjointOperator& reference,
                              const std::vector<double>& t_grid, const SchrodingerSuiteOptions& options);

struct DgOptions {
    double speed = 0.0;  // 0: measure with propagation_speed
    std::vector<double> speed_tau{5.0, 6.0, 8.0, 10.0};
    double speed_mass_tol = 1e-6;
    std::vector<double> volume_radii;  // default 1..8
    double volume_crossover = 3.5;
    Tolerances tolerances;
};
// Unit balls around `center` and around points at the given graph distances
// from it; the middle candidate (by index) is taken at each distance.
std::vector<BallPair> make_pair_schedule(const MetricMeasureSpace& space, std::size_t center,
                                         const std::vector<double>& separations, double radius);
SuiteReport suite_dg_decay(const SelfAdjointOperator& op, const std::vector<double>& t_grid,
                           const std::vector<BallPair>& pairs, const DgOptions& options);

struct LocalityOptions {
    double slack = 0.1;
    std::vector<double> speed_tau{5.0, 6.0, 8.0, 10.0};
    double speed_mass_tol = 1e-6;
    Tolerances tolerances;
};
SuiteReport suite_locality(const SelfAdjointOperator& op, const MultiplierFunction& f,
                           const std::vector<double>& r_grid, const LocalityOptions& options);

struct SubordinationOptions {
    double quad_tol = 1e-9;
    Tolerances tolerances;
};
SuiteReport suite_subordination(const std::vector<double>& a_grid, const std::vector<double>& xi_grid,
                                const SubordinationOptions& options, int jobs = 1);

// Log-log slope of the local maxima of |F_a| over [lo, hi].
ExponentFit fa_envelope_fit(double a, double lo, double hi);

}  // namespace smlab
