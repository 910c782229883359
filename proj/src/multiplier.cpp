#include "smlab/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "smlab/error.hpp"

namespace smlab {

namespace {

using cd = std::complex<double>;

double cutoff(double lambda) { return smooth_step(2.0 * (lambda + 1.0)); }

double psi0(double x) {
    if (x <= 0.25 || x >= 1.0) return 0.0;
    return std::exp(-1.0 / ((x - 0.25) * (1.0 - x)));
}

double param(const std::map<std::string, double>& p, const std::string& key, const std::string& family) {
    auto it = p.find(key);
    if (it == p.end()) throw ConfigError("multiplier family '" + family + "' needs parameter '" + key + "'");
    return it->second;
}

}  // namespace

double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

double f_a(double a, double lambda) {
    if (!(a > 0.0)) throw DomainError("f_a: a must be positive");
    const double nu = a + 0.5;
    const double x = std::fabs(lambda);
    const double scale = std::pow(4.0, -(a + 1.5));
    if (x < 2.0) {
        // (2/x)^nu J_nu(x) = sum_k (-x^2/4)^k / (k! Gamma(k + nu + 1))
        const double q = -0.25 * x * x;
        double term = 1.0 / std::tgamma(nu + 1.0);
        double sum = term;
        for (int k = 1; k < 40; ++k) {
            term *= q / (k * (k + nu));
            sum += term;
            if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
        }
        return scale * sum;
    }
    return scale * std::pow(2.0 / x, nu) * std::cyl_bessel_j(nu, x);
}

double dyadic_phi(double lambda) {
    const double x = std::fabs(lambda);
    if (x <= 0.25 || x >= 1.0) return 0.0;
    // For x in (1/4, 1) only the copies at x, 2x and x/2 can be nonzero.
    const double denom = psi0(x) + psi0(2.0 * x) + psi0(0.5 * x);
    return psi0(x) / denom;
}

double dyadic_phi0(double lambda) {
    const double x = std::fabs(lambda);
    if (x <= 0.5) return 1.0;
    if (x >= 1.0) return 0.0;
    return dyadic_phi(x);
}

MultiplierFunction MultiplierFunction::constant(double c) {
    MultiplierFunction f;
    f.eval_ = [c](double) { return cd(c, 0.0); };
    f.line_ = f.eval_;
    f.family_ = Family::constant;
    f.name_ = "constant";
    f.params_ = {{"value", c}};
    if (c == 0.0) {
        f.support_ = Interval{0.0, 0.0};
        f.bandlimit_ = 0.0;
    }
    return f;
}

MultiplierFunction MultiplierFunction::gaussian() {
    MultiplierFunction f;
    f.line_ = [](double l) { return cd(std::exp(-l) * cutoff(l), 0.0); };
    f.eval_ = f.line_;
    f.family_ = Family::gaussian;
    f.name_ = "gaussian";
    f.breakpoints_ = {-1.0, -0.5};
    return f;
}

MultiplierFunction MultiplierFunction::osc_gaussian(double xi) {
    MultiplierFunction f;
    f.line_ = [xi](double l) { return std::exp(cd(-l, xi * l)) * cutoff(l); };
    f.eval_ = f.line_;
    f.real_ = xi == 0.0;
    f.family_ = Family::osc_gaussian;
    f.name_ = "osc_gaussian";
    f.params_ = {{"xi", xi}};
    f.breakpoints_ = {-1.0, -0.5};
    return f;
}

MultiplierFunction MultiplierFunction::resolvent_power(double sigma) {
    if (!(sigma > 0.0)) throw DomainError("resolvent_power: sigma must be positive");
    MultiplierFunction f;
    f.line_ = [sigma](double l) {
        return l <= -1.0 ? cd(0.0) : cd(std::pow(1.0 + l, -sigma) * cutoff(l), 0.0);
    };
    f.eval_ = f.line_;
    f.family_ = Family::resolvent_power;
    f.name_ = "resolvent_power";
    f.params_ = {{"sigma", sigma}};
    f.breakpoints_ = {-1.0, -0.5};
    return f;
}

MultiplierFunction MultiplierFunction::bochner_riesz(double delta) {
    if (!(delta >= 0.0)) throw DomainError("bochner_riesz: delta must be nonnegative");
    MultiplierFunction f;
    f.line_ = [delta](double l) {
        if (l >= 1.0 || l <= -1.0) return cd(0.0);
        return cd(std::pow(1.0 - l, delta) * cutoff(l), 0.0);
    };
    f.eval_ = f.line_;
    f.family_ = Family::bochner_riesz;
    f.name_ = "bochner_riesz";
    f.params_ = {{"delta", delta}};
    f.support_ = Interval{-1.0, 1.0};
    f.breakpoints_ = {-1.0, -0.5, 1.0};
    return f;
}

MultiplierFunction MultiplierFunction::fa(double a) {
    if (!(a > 0.0)) throw DomainError("f_a: a must be positive");
    MultiplierFunction f;
    f.line_ = [a](double l) { return cd(f_a(a, l), 0.0); };
    f.eval_ = f.line_;
    f.family_ = Family::f_a;
    f.name_ = "f_a";
    f.params_ = {{"a", a}};
    f.bandlimit_ = 1.0;
    return f;
}

MultiplierFunction MultiplierFunction::bump(double center, double half_width) {
    if (!(half_width > 0.0)) throw DomainError("bump: half width must be positive");
    MultiplierFunction f;
    f.line_ = [center, half_width](double l) {
        return cd(smooth_step((half_width - std::fabs(l - center)) / (0.5 * half_width)), 0.0);
    };
    f.eval_ = f.line_;
    f.family_ = Family::bump;
    f.name_ = "bump";
    f.params_ = {{"center", center}, {"half_width", half_width}};
    f.support_ = Interval{center - half_width, center + half_width};
    f.breakpoints_ = {center - half_width, center - 0.5 * half_width, center + 0.5 * half_width,
                      center + half_width};
    return f;
}

MultiplierFunction MultiplierFunction::tabulated(std::vector<double> lambda, std::vector<double> value,
                                                 double tol) {
    if (lambda.size() != value.size() || lambda.size() < 2)
        throw ConfigError("tabulated multiplier needs at least two (lambda, value) rows");
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (!std::isfinite(lambda[i]) || !std::isfinite(value[i]))
            throw ConfigError("tabulated multiplier has a non-finite entry");
        if (lambda[i] < 0.0) throw ConfigError("tabulated multiplier needs lambda >= 0");
        if (i > 0 && !(lambda[i] > lambda[i - 1]))
            throw ConfigError("tabulated multiplier needs strictly increasing lambda");
    }
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < lambda.size(); ++i) {
        const double h1 = lambda[i] - lambda[i - 1], h2 = lambda[i + 1] - lambda[i];
        const double second = 2.0 * ((value[i + 1] - value[i]) / h2 - (value[i] - value[i - 1]) / h1) / (h1 + h2);
        err = std::max(err, std::max(h1, h2) * std::max(h1, h2) / 8.0 * std::fabs(second));
    }
    if (err > tol)
        throw DomainError("tabulated multiplier grid too coarse: interpolation error estimate " +
                          std::to_string(err) + " exceeds " + std::to_string(tol));
    auto interp = [lambda, value](double l) {
        const double x = std::fabs(l);
        if (x > lambda.back()) return cd(0.0);
        if (x <= lambda.front()) return cd(value.front());
        const auto it = std::upper_bound(lambda.begin(), lambda.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - lambda.begin());
        const double w = (x - lambda[j - 1]) / (lambda[j] - lambda[j - 1]);
        return cd((1.0 - w) * value[j - 1] + w * value[j]);
    };
    MultiplierFunction f;
    f.support_ = Interval{-lambda.back(), lambda.back()};
    f.breakpoints_ = {-lambda.back(), 0.0, lambda.back()};
    f.eval_ = interp;
    f.line_ = interp;
    f.family_ = Family::tabulated;
    f.name_ = "tabulated";
    f.params_ = {{"nodes", static_cast<double>(lambda.size())}, {"interp_error", err}};
    return f;
}

MultiplierFunction MultiplierFunction::custom(std::string name, Eval fn, bool real,
                                              std::optional<Interval> support,
                                              std::optional<double> bandlimit, Eval line) {
    MultiplierFunction f;
    f.eval_ = fn;
    f.line_ = line ? std::move(line) : Eval([fn](double l) { return fn(std::fabs(l)); });
    f.real_ = real;
    f.family_ = Family::custom;
    f.name_ = std::move(name);
    f.support_ = support;
    f.bandlimit_ = bandlimit;
    return f;
}

MultiplierFunction MultiplierFunction::times(const MultiplierFunction& g, std::string name) const {
    MultiplierFunction f;
    auto a = *this;
    f.eval_ = [a, g](double l) { return a(l) * g(l); };
    f.line_ = [a, g](double l) { return a.line(l) * g.line(l); };
    f.real_ = real_ && g.real_;
    f.family_ = Family::custom;
    f.name_ = std::move(name);
    if (support_ && g.support_) {
        f.support_ = Interval{std::max(support_->lo, g.support_->lo), std::min(support_->hi, g.support_->hi)};
        if (f.support_->hi < f.support_->lo) f.support_ = Interval{0.0, 0.0};
    } else {
        f.support_ = support_ ? support_ : g.support_;
    }
    if (bandlimit_ && g.bandlimit_) f.bandlimit_ = *bandlimit_ + *g.bandlimit_;
    f.breakpoints_ = breakpoints_;
    f.breakpoints_.insert(f.breakpoints_.end(), g.breakpoints_.begin(), g.breakpoints_.end());
    std::sort(f.breakpoints_.begin(), f.breakpoints_.end());
    f.breakpoints_.erase(std::unique(f.breakpoints_.begin(), f.breakpoints_.end()), f.breakpoints_.end());
    return f;
}

MultiplierFunction MultiplierFunction::dilated(double t) const {
    if (!(t > 0.0)) throw DomainError("dilation factor must be positive");
    MultiplierFunction f = *this;
    auto a = *this;
    f.eval_ = [a, t](double l) { return a(t * l); };
    f.line_ = [a, t](double l) { return a.line(t * l); };
    if (support_) f.support_ = Interval{support_->lo / t, support_->hi / t};
    if (bandlimit_) f.bandlimit_ = *bandlimit_ * t;
    for (double& b : f.breakpoints_) b /= t;
    f.params_["dilation"] = t * (params_.count("dilation") ? params_.at("dilation") : 1.0);
    return f;
}

std::vector<MultiplierFunction> dyadic_partition(const MultiplierFunction& f, int ell_max) {
    if (ell_max < 1) throw ConfigError("dyadic_partition: ell_max must be at least 1");
    std::vector<MultiplierFunction> pieces;
    auto phi0 = MultiplierFunction::custom(
        "phi_0", [](double l) { return cd(dyadic_phi0(l)); }, true, Interval{-1.0, 1.0});
    MultiplierFunction p0 = f.times(phi0, "dyadic_piece");
    pieces.push_back(p0);
    for (int ell = 1; ell <= ell_max; ++ell) {
        const double s = std::ldexp(1.0, -ell);
        auto phi = MultiplierFunction::custom(
            "phi", [s](double l) { return cd(dyadic_phi(s * l)); }, true,
            Interval{std::ldexp(1.0, ell - 2), std::ldexp(1.0, ell)},
            std::nullopt, [s](double l) { return cd(dyadic_phi(s * l)); });
        pieces.push_back(f.times(phi, "dyadic_piece"));
    }
    return pieces;
}

MultiplierFunction multiplier_from_params(const std::string& family,
                                          const std::map<std::string, double>& params) {
    if (family == "constant") return MultiplierFunction::constant(param(params, "value", family));
    if (family == "gaussian") return MultiplierFunction::gaussian();
    if (family == "osc_gaussian") return MultiplierFunction::osc_gaussian(param(params, "xi", family));
    if (family == "resolvent_power")
        return MultiplierFunction::resolvent_power(param(params, "sigma", family));
    if (family == "bochner_riesz") return MultiplierFunction::bochner_riesz(param(params, "delta", family));
    if (family == "f_a") return MultiplierFunction::fa(param(params, "a", family));
    if (family == "bump")
        return MultiplierFunction::bump(param(params, "center", family), param(params, "half_width", family));
    throw ConfigError("unknown multiplier family '" + family + "'");
}

std::vector<std::string> multiplier_param_names(const std::string& family) {
    static const std::map<std::string, std::vector<std::string>> names = {
        {"constant", {"value"}},     {"gaussian", {}},        {"osc_gaussian", {"xi"}},
        {"resolvent_power", {"sigma"}}, {"bochner_riesz", {"delta"}}, {"f_a", {"a"}},
        {"bump", {"center", "half_width"}}};
    const auto it = names.find(family);
    if (it == names.end()) throw ConfigError("unknown multiplier family '" + family + "'");
    return it->second;
}

MultiplierFunction load_tabulated(const std::string& path, double tol) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tabulated multiplier '" + path + "'");
    std::vector<double> l, v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'lambda value'");
        l.push_back(a);
        v.push_back(b);
    }
    return MultiplierFunction::tabulated(std::move(l), std::move(v), tol);
}

}  // namespace smlab
