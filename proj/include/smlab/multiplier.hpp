#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace smlab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Smooth step: 0 for x <= 0, 1 for x >= 1, C-infinity in between.
double smooth_step(double x);

// Spectral function F(lambda), lambda >= 0, plus an extension to the whole
// line used by Sobolev norms and numerical derivatives. Families that are
// not naturally defined for lambda < 0 are extended by their analytic
// formula times a cutoff equal to 1 on [-1/2, inf) and 0 below -1.
class MultiplierFunction {
public:
    using Eval = std::function<std::complex<double>(double)>;

    enum class Family {
        constant,
        gaussian,
        osc_gaussian,
        resolvent_power,
        bochner_riesz,
        f_a,
        bump,
        dyadic_piece,
        tabulated,
        custom
    };

    static MultiplierFunction constant(double c);
    static MultiplierFunction gaussian();                      // e^{-lambda}
    static MultiplierFunction osc_gaussian(double xi);         // e^{i xi lambda} e^{-lambda}
    static MultiplierFunction resolvent_power(double sigma);   // (1 + lambda)^{-sigma}
    static MultiplierFunction bochner_riesz(double delta);     // (1 - lambda)_+^delta
    static MultiplierFunction fa(double a);                    // F_a, bandlimit 1
    // 1 on |lambda - center| <= half_width / 2, 0 outside |lambda - center| < half_width.
    static MultiplierFunction bump(double center, double half_width);
    // Linear interpolation of (lambda, value) pairs, 0 beyond the last node,
    // even reflection on the line. Rejects tables whose interpolation error
    // estimate (second differences / 8) exceeds `tol`.
    static MultiplierFunction tabulated(std::vector<double> lambda, std::vector<double> value,
                                        double tol = 1e-8);
    static MultiplierFunction custom(std::string name, Eval f, bool real,
                                     std::optional<Interval> support = std::nullopt,
                                     std::optional<double> bandlimit = std::nullopt,
                                     Eval line = {});

    // Pointwise product; keeps the intersection of declared supports.
    MultiplierFunction times(const MultiplierFunction& g, std::string name) const;
    // lambda -> F(t * lambda)
    MultiplierFunction dilated(double t) const;

    std::complex<double> operator()(double lambda) const { return eval_(lambda); }
    double real_value(double lambda) const { return eval_(lambda).real(); }
    std::complex<double> line(double lambda) const { return line_(lambda); }

    bool is_real() const { return real_; }
    Family family() const { return family_; }
    const std::string& name() const { return name_; }
    const std::map<std::string, double>& params() const { return params_; }
    const std::optional<Interval>& declared_support() const { return support_; }
    const std::optional<double>& bandlimit() const { return bandlimit_; }
    // Points where the line extension is not smooth or changes formula.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

private:
    MultiplierFunction() = default;
    Eval eval_;
    Eval line_;
    bool real_ = true;
    Family family_ = Family::custom;
    std::string name_;
    std::map<std::string, double> params_;
    std::optional<Interval> support_;
    std::optional<double> bandlimit_;
    std::vector<double> breakpoints_;
};

// F_a(lambda) = c_a * integral_{-1}^{1} (1 - u^2)^a cos(lambda u) du with
// F_a(0) = 1 / (Gamma(a + 3/2) 4^{a + 3/2}).
double f_a(double a, double lambda);

// Dyadic bump phi with support [1/4, 1] and sum_l phi(2^-l lambda) = 1 for
// lambda > 0, and phi_0 = 1 - sum_{l >= 1} phi(2^-l .).
double dyadic_phi(double lambda);
double dyadic_phi0(double lambda);

// Pieces F*phi_0, F*phi(2^-l .) for l = 1..ell_max. They sum to F on
// [0, 2^(ell_max - 1)].
std::vector<MultiplierFunction> dyadic_partition(const MultiplierFunction& f, int ell_max);

// Family by name and parameters, as used in configuration files:
// constant(value), gaussian, osc_gaussian(xi), resolvent_power(sigma),
// bochner_riesz(delta), f_a(a), bump(center, half_width).
MultiplierFunction multiplier_from_params(const std::string& family,
                                          const std::map<std::string, double>& params);
// Parameter names of a family; ConfigError for unknown families.
std::vector<std::string> multiplier_param_names(const std::string& family);

// Two-column text file "lambda value".
MultiplierFunction load_tabulated(const std::string& path, double tol = 1e-8);

}  // namespace smlab
