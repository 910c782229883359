#include "smlab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smlab/error.hpp"
#include "smlab/parallel.hpp"
#include "smlab/quadrature.hpp"
#include "smlab/simd/kernels.hpp"

namespace smlab {

using cd = std::complex<double>;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Eigenvalues that are distinct to 1e-12 relative, plus the map back.
struct DistinctValues {
    std::vector<double> values;
    std::vector<std::size_t> index;
};

DistinctValues distinct(const Eigen::VectorXd& lambda) {
    DistinctValues d;
    d.index.resize(static_cast<std::size_t>(lambda.size()));
    std::vector<std::size_t> order(d.index.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lambda[Eigen::Index(a)] < lambda[Eigen::Index(b)]; });
    for (std::size_t i : order) {
        const double v = lambda[Eigen::Index(i)];
        if (d.values.empty() || v - d.values.back() > 1e-12 * std::max(1.0, std::fabs(v)))
            d.values.push_back(v);
        d.index[i] = d.values.size() - 1;
    }
    return d;
}

double sqrt_clipped(double lambda) { return std::sqrt(std::max(lambda, 0.0)); }

}  // namespace

OperatorKernel kernel_from_spectrum(const SelfAdjointOperator& op, const std::vector<cd>& f) {
    const auto& es = op.eigensystem();
    const Eigen::Index n = es.values.size();
    if (static_cast<Eigen::Index>(f.size()) != n)
        throw ConfigError("kernel_from_spectrum: one value per eigenpair expected");
    Eigen::VectorXd re(n), im(n);
    bool complex = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        const cd v = f[std::size_t(i)];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("multiplier is not finite at eigenvalue " + fmt(es.values[i]));
        re[i] = v.real();
        im[i] = v.imag();
        complex = complex || v.imag() != 0.0;
    }
    OperatorKernel k;
    k.space = op.space_ptr();
    const Eigen::MatrixXd& u = es.vectors;
    k.re.noalias() = (u * re.asDiagonal()) * u.transpose();
    k.re = 0.5 * (k.re + k.re.transpose()).eval();
    if (complex) {
        k.im.noalias() = (u * im.asDiagonal()) * u.transpose();
        k.im = 0.5 * (k.im + k.im.transpose()).eval();
    }
    return k;
}

OperatorKernel apply_multiplier(const SelfAdjointOperator& op, const MultiplierFunction& f, double t) {
    if (!(t > 0.0)) throw DomainError("apply_multiplier: t must be positive");
    const auto& lambda = op.eigensystem().values;
    std::vector<cd> v(static_cast<std::size_t>(lambda.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(t * lambda[Eigen::Index(i)]);
    return kernel_from_spectrum(op, v);
}

OperatorKernel heat_kernel(const SelfAdjointOperator& op, double t) {
    if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
    const auto& lambda = op.eigensystem().values;
    std::vector<cd> v(static_cast<std::size_t>(lambda.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-t * lambda[Eigen::Index(i)]);
    return kernel_from_spectrum(op, v);
}

double subordination_integral(double a, double xi, double quad_tol) {
    if (!(a > 0.0)) throw DomainError("subordination: a must be positive");
    const double peak = f_a(a, 0.0);
    QuadratureOptions opt;
    opt.abs_tol = quad_tol;
    const double fx = std::fabs(xi);
    opt.frequency = [fx](double s) { return fx / (2.0 * std::sqrt(std::max(s, 1e-2))); };
    auto integrand = [a, xi](double s) {
        return f_a(a, std::sqrt(s) * xi) * std::pow(s, a + 0.5) * std::exp(-0.25 * s);
    };
    auto envelope = [a, peak](double s) { return peak * std::pow(s, a + 0.5) * std::exp(-0.25 * s); };
    return integrate_to_infinity(RealFn(integrand), 0.0, RealFn(envelope), opt).value;
}

double subordination_check(double a, const std::vector<double>& xi_grid, double quad_tol, int jobs) {
    std::vector<double> res(xi_grid.size());
    parallel_for(xi_grid.size(), jobs, [&](std::size_t i) {
        const double xi = xi_grid[i];
        res[i] = std::fabs(subordination_integral(a, xi, quad_tol) - std::exp(-xi * xi));
    });
    return res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
}

cd wave_rewrite_value(double lambda, double t, double xi, double a, double quad_tol) {
    if (!(t > 0.0)) throw DomainError("wave rewrite needs t > 0");
    if (!(a > 0.0)) throw DomainError("wave rewrite needs a > 0");
    const double l = std::max(lambda, 0.0);
    const cd w(t, -xi * t);
    const cd wpow = std::pow(w, -(a + 1.5));
    const cd inv4w = 1.0 / (4.0 * w);
    const double decay = inv4w.real();
    const double peak = f_a(a, 0.0) * std::abs(wpow);
    QuadratureOptions opt;
    opt.abs_tol = quad_tol;
    const double sl = std::sqrt(l), osc = std::fabs(inv4w.imag());
    opt.frequency = [sl, osc](double s) { return sl / (2.0 * std::sqrt(std::max(s, 1e-2))) + osc; };
    auto integrand = [=](double s) {
        return f_a(a, std::sqrt(s * l)) * std::pow(s, a + 0.5) * wpow * std::exp(-s * inv4w);
    };
    auto envelope = [=](double s) { return peak * std::pow(s, a + 0.5) * std::exp(-s * decay); };
    return integrate_to_infinity(ComplexFn(integrand), 0.0, RealFn(envelope), opt).value;
}

double wave_rewrite_check(const SelfAdjointOperator& op, double t, double xi, double a, double quad_tol,
                          int jobs) {
    const auto d = distinct(op.eigensystem().values);
    std::vector<double> res(d.values.size());
    parallel_for(d.values.size(), jobs, [&](std::size_t i) {
        const double l = std::max(d.values[i], 0.0);
        const cd target = std::exp(cd(-t * l, xi * t * l));
        res[i] = std::abs(wave_rewrite_value(l, t, xi, a, quad_tol) - target);
    });
    return res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
}

namespace {

// Range outside which the line extension vanishes to double precision.
Interval line_range(const MultiplierFunction& f) {
    if (f.declared_support()) return *f.declared_support();
    double scale = 0.0;
    for (double x = -2.0; x <= 2.0; x += 0.125) scale = std::max(scale, std::abs(f.line(x)));
    for (double b : f.breakpoints()) scale = std::max(scale, std::abs(f.line(b)));
    auto negligible = [&](double edge, double sign) {
        for (double q : {1.0, 1.25, 1.5, 2.0, 3.0, 4.0})
            if (std::abs(f.line(sign * edge * q)) > 1e-17 * scale) return false;
        return true;
    };
    Interval r;
    for (double sign : {-1.0, 1.0}) {
        double edge = 1.0;
        while (!negligible(edge, sign)) {
            edge *= 2.0;
            if (edge > 4096.0) throw NumericalError("sobolev norm: " + f.name() + " does not decay on the line");
        }
        (sign < 0 ? r.lo : r.hi) = sign * edge;
    }
    return r;
}

double sobolev_at_cutoff(const MultiplierFunction& f, double s, const Interval& range, double cutoff,
                         const GaussRule& rule) {
    // Panels in lambda: breakpoints, then at most 2 pi / cutoff wide.
    std::vector<double> cuts{range.lo, range.hi, 0.0};
    for (double b : f.breakpoints())
        if (b > range.lo && b < range.hi) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> nodes, weights;
    std::vector<cd> values;
    const double max_w = 2.0 * std::numbers::pi / cutoff;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double len = cuts[c + 1] - cuts[c];
        if (len <= 0.0) continue;
        const auto panels = static_cast<std::size_t>(std::ceil(len / max_w));
        const double h = len / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double a = cuts[c] + h * static_cast<double>(p);
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                const double x = a + 0.5 * h * (rule.nodes[j] + 1.0);
                const cd v = f.line(x);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw NumericalError("sobolev norm: " + f.name() + " not finite at " + fmt(x));
                nodes.push_back(x);
                weights.push_back(0.5 * h * rule.weights[j]);
                values.push_back(v);
            }
        }
    }
    // Frequency side: |F^| oscillates at most at rate max|lambda|.
    const double reach = std::max({std::fabs(range.lo), std::fabs(range.hi), 1.0});
    const double lo = f.is_real() ? 0.0 : -cutoff;
    const double sym = f.is_real() ? 2.0 : 1.0;
    const auto panels = static_cast<std::size_t>(std::ceil((cutoff - lo) / (std::numbers::pi / reach)));
    const double h = (cutoff - lo) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const double xi = lo + h * static_cast<double>(p) + 0.5 * h * (rule.nodes[j] + 1.0);
            cd hat = 0.0;
            for (std::size_t k = 0; k < nodes.size(); ++k)
                hat += weights[k] * values[k] * std::polar(1.0, -nodes[k] * xi);
            total += 0.5 * h * rule.weights[j] * std::pow(1.0 + xi * xi, s) * std::norm(hat);
        }
    }
    return sym * total / (2.0 * std::numbers::pi);
}

}  // namespace

double sobolev_norm(const MultiplierFunction& f, double s, const SobolevOptions& options) {
    if (!(s >= 0.0)) throw DomainError("sobolev norm: s must be nonnegative");
    if (f.family() == MultiplierFunction::Family::constant) {
        if (f.params().at("value") == 0.0) return 0.0;
        throw NumericalError("sobolev norm: nonzero constant is not in L^2 of the line");
    }
    const Interval range = line_range(f);
    const GaussRule rule = gauss_legendre(16);
    double prev = -1.0, prev_step = -1.0;
    int growing = 0;
    for (double cutoff = options.initial_cutoff; cutoff <= options.max_cutoff; cutoff *= 2.0) {
        const double value = sobolev_at_cutoff(f, s, range, cutoff, rule);
        if (prev >= 0.0) {
            const double norm = std::sqrt(value), step = value - prev;
            if (std::fabs(norm - std::sqrt(prev)) <= options.rel_tol * norm) return norm;
            if (prev_step > 0.0 && step >= 0.9 * prev_step) {
                if (++growing >= 3)
                    throw NumericalError("sobolev norm of " + f.name() + " with s = " + fmt(s) +
                                         " diverges under frequency refinement");
            } else {
                growing = 0;
            }
            prev_step = step;
        }
        prev = value;
    }
    throw NumericalError("sobolev norm of " + f.name() + " with s = " + fmt(s) +
                         " did not converge under frequency refinement");
}

namespace {

// Fornberg weights for the m-th derivative at 0 on integer offsets.
std::vector<double> fornberg(int m, const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::vector<std::vector<double>>> c(
        n, std::vector<std::vector<double>>(n, std::vector<double>(std::size_t(m) + 1, 0.0)));
    c[0][0][0] = 1.0;
    double c1 = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        double c2 = 1.0;
        const std::size_t mn = std::min<std::size_t>(i, std::size_t(m));
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            for (std::size_t k = 0; k <= mn; ++k) {
                const double prev = k > 0 ? c[i - 1][j][k - 1] : 0.0;
                c[i][j][k] = (x[i] * c[i - 1][j][k] - double(k) * prev) / c3;
            }
        }
        for (std::size_t k = 0; k <= mn; ++k) {
            const double prev = k > 0 ? c[i - 1][i - 1][k - 1] : 0.0;
            c[i][i][k] = c1 / c2 * (double(k) * prev - x[i - 1] * c[i - 1][i - 1][k]);
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = c[n - 1][j][std::size_t(m)];
    return w;
}

}  // namespace

cd numerical_derivative(const MultiplierFunction& f, int m, double lambda) {
    if (m < 0) throw ConfigError("derivative order must be nonnegative");
    if (m == 0) return f.line(lambda);
    const int p = (m + 1) / 2 + 1;
    std::vector<double> offsets;
    for (int j = -p; j <= p; ++j) offsets.push_back(j);
    const auto w = fornberg(m, offsets);
    const double step = std::max(1e-3, std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (m + 4))) *
                        (1.0 + std::fabs(lambda));
    cd sum = 0.0;
    for (std::size_t j = 0; j < offsets.size(); ++j) sum += w[j] * f.line(lambda + offsets[j] * step);
    const cd d = sum / std::pow(step, m);
    if (!std::isfinite(d.real()) || !std::isfinite(d.imag()))
        throw NumericalError("derivative estimation failed for " + f.name() + " at " + fmt(lambda));
    return d;
}

HormanderResult hormander_check(const MultiplierFunction& f, double sigma, double kappa, double eps,
                                const HormanderOptions& options) {
    if (!(eps > 0.0)) throw DomainError("hormander check needs eps > 0");
    if (!(options.lambda_max > 10.0)) throw ConfigError("hormander check needs lambda_max > 10");
    HormanderResult res;
    res.m_max = static_cast<int>(std::floor(2.0 * sigma + 2.0 * kappa + 1.0)) + 1;
    std::vector<double> high;
    const double decades = std::log10(options.lambda_max);
    const auto count = static_cast<std::size_t>(std::ceil(decades * double(options.per_decade)));
    for (std::size_t i = 0; i <= count; ++i) high.push_back(std::pow(10.0, decades * double(i) / double(count)));
    const double split = options.lambda_max / 10.0;
    res.pass = true;
    for (int m = 0; m <= res.m_max; ++m) {
        double low = 0.0, inner = 0.0, outer = 0.0;
        for (std::size_t i = 0; i < options.low_samples; ++i)
            low = std::max(low, std::abs(numerical_derivative(f, m, double(i) / double(options.low_samples))));
        for (double l : high) {
            const double v = std::pow(l, m + eps) * std::abs(numerical_derivative(f, m, l));
            if (!std::isfinite(v)) throw NumericalError("hormander check: non-finite weighted derivative");
            (l < split ? inner : outer) = std::max(l < split ? inner : outer, v);
        }
        const double growth = outer / std::max(inner, 1e-300);
        res.low_sup.push_back(low);
        res.high_sup.push_back(std::max(inner, outer));
        res.growth.push_back(growth);
        if (outer > options.growth_factor * inner && outer >= 1e-14) res.pass = false;
        res.constant = std::max({res.constant, low, inner, outer});
    }
    return res;
}

double cfl_speed(const MetricMeasureSpace& space) {
    double rate = 0.0;
    for (std::size_t x = 0; x < space.size(); ++x) {
        double sum = 0.0;
        for (const auto& nb : space.neighbors(x)) sum += nb.conductance;
        rate = std::max(rate, sum / space.mu()[x]);
    }
    return std::sqrt(2.0 * rate) * space.min_length();
}

double propagation_speed(const SelfAdjointOperator& op, const std::vector<double>& tau_grid, double mass_tol,
                         const PropagationOptions& options) {
    if (tau_grid.empty()) throw ConfigError("propagation speed needs at least one tau");
    if (!(mass_tol > 0.0 && mass_tol < 1.0)) throw ConfigError("propagation mass tolerance must be in (0, 1)");
    const auto& space = op.space();
    const std::size_t n = space.size();
    if (n == 1) return 0.0;
    const auto& dist = space.distance_table();
    const auto& lambda = op.eigensystem().values;
    const auto& mu = space.mu();
    double speed = 0.0;
    std::vector<std::pair<double, double>> column(n);
    for (double tau : tau_grid) {
        if (!(tau > 0.0)) throw ConfigError("propagation tau must be positive");
        std::vector<cd> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::cos(tau * sqrt_clipped(lambda[Eigen::Index(i)]));
        const auto k = kernel_from_spectrum(op, f);
        double reach = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            double total = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                const double m = std::fabs(k.re(Eigen::Index(x), Eigen::Index(y))) * mu[x];
                column[x] = {dist[x * n + y], m};
                total += m;
            }
            std::sort(column.begin(), column.end(), [](auto& a, auto& b) { return a.first > b.first; });
            double tail = 0.0, need = 0.0;
            for (std::size_t i = 0; i < n;) {
                double group = 0.0;
                std::size_t j = i;
                for (; j < n && column[j].first == column[i].first; ++j) group += column[j].second;
                if (tail + group > mass_tol * total) {
                    need = column[i].first;
                    break;
                }
                tail += group;
                i = j;
            }
            reach = std::max(reach, need);
        }
        speed = std::max(speed, reach / tau);
    }
    const double v_max = options.v_max ? *options.v_max : 10.0 * cfl_speed(space);
    if (speed > v_max)
        throw NumericalError("propagation speed " + fmt(speed) + " exceeds the bound " + fmt(v_max));
    return speed;
}

double locality_check(const SelfAdjointOperator& op, const MultiplierFunction& f, double r, double slack,
                      double speed) {
    if (!f.bandlimit()) throw ConfigError("locality check: multiplier " + f.name() + " has no bandlimit");
    if (!(r > 0.0) || !(slack >= 0.0) || !(speed > 0.0))
        throw ConfigError("locality check needs r > 0, slack >= 0, speed > 0");
    const double band = *f.bandlimit();
    if (band == 0.0) return 0.0;
    const auto& lambda = op.eigensystem().values;
    const std::size_t n = op.size();
    std::vector<cd> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(r * sqrt_clipped(lambda[Eigen::Index(i)]) / band);
    const auto k = kernel_from_spectrum(op, v);
    const auto& dist = op.space().distance_table();
    const auto& mu = op.space().mu();
    std::vector<double> total(n), outside(n);
    const auto& kt = simd::kernels();
    kt.abs_col_sums(k.re.data(), k.im_data(), n, n, mu.data(), total.data());
    kt.masked_abs_col_sums(k.re.data(), k.im_data(), dist.data(), n, n, speed * r * (1.0 + slack), mu.data(),
                           outside.data());
    double leak = 0.0;
    for (std::size_t y = 0; y < n; ++y)
        if (total[y] > 0.0) leak = std::max(leak, outside[y] / total[y]);
    return leak;
}

double resolvent_power_quadrature(double lambda, double t, double sigma, double quad_tol) {
    if (!(sigma > 0.0)) throw DomainError("resolvent power needs sigma > 0");
    const double rate = 1.0 + t * t * std::max(lambda, 0.0);
    // s = u^{1/sigma} turns (1/Gamma(sigma)) int e^{-s rate} s^{sigma-1} ds
    // into (1/Gamma(sigma+1)) int exp(-u^{1/sigma} rate) du.
    const double scale = std::pow(rate, -sigma);  // natural width of the integrand in u
    auto integrand = [=](double u) { return std::exp(-std::pow(u, 1.0 / sigma) * rate); };
    auto envelope = [=](double u) { return std::exp(-std::pow(u, 1.0 / sigma) * rate); };
    QuadratureOptions opt;
    opt.abs_tol = quad_tol * std::tgamma(sigma + 1.0) * scale;
    opt.max_panel = scale;
    const auto r = integrate_to_infinity(RealFn(integrand), 0.0, RealFn(envelope), opt);
    return r.value / std::tgamma(sigma + 1.0);
}

OperatorKernel resolvent_power(const SelfAdjointOperator& op, double t, double sigma, ResolventPath path) {
    if (!(t > 0.0)) throw DomainError("resolvent power needs t > 0");
    if (!(sigma > 0.0)) throw DomainError("resolvent power needs sigma > 0");
    const auto& lambda = op.eigensystem().values;
    const std::size_t n = op.size();
    std::vector<cd> v(n);
    if (path == ResolventPath::spectral) {
        for (std::size_t i = 0; i < n; ++i)
            v[i] = std::pow(1.0 + t * t * lambda[Eigen::Index(i)], -sigma);
    } else {
        const auto d = distinct(lambda);
        std::vector<double> q(d.values.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = resolvent_power_quadrature(d.values[i], t, sigma);
        for (std::size_t i = 0; i < n; ++i) v[i] = q[d.index[i]];
    }
    return kernel_from_spectrum(op, v);
}

cd complex_resolvent_quadrature(double lambda, cd z, double quad_tol) {
    if (!(z.real() > 0.0)) throw DomainError("complex resolvent needs Re z > 0");
    const double r = std::abs(z), theta = std::arg(z);
    const cd rot = std::polar(1.0, -theta);
    const cd rate = lambda * rot + r * r * std::conj(rot);
    const double decay = rate.real();
    if (!(decay > 0.0)) throw DomainError("complex resolvent formula needs lambda + r^2 > 0");
    QuadratureOptions opt;
    opt.abs_tol = quad_tol / decay;
    const double osc = std::fabs(rate.imag());
    opt.frequency = [osc](double) { return osc; };
    opt.max_panel = 1.0 / decay;
    auto integrand = [rate](double s) { return std::exp(-s * rate); };
    auto envelope = [decay](double s) { return std::exp(-s * decay); };
    return rot * integrate_to_infinity(ComplexFn(integrand), 0.0, RealFn(envelope), opt).value;
}

OperatorKernel complex_time_resolvent(const SelfAdjointOperator& op, cd z) {
    if (!(z.real() > 0.0)) throw DomainError("complex resolvent needs Re z > 0");
    const auto& lambda = op.eigensystem().values;
    const std::size_t n = op.size();
    std::vector<cd> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double l = lambda[Eigen::Index(i)];
        const cd d = z * z + l;
        if (std::abs(d) <= 1e-14 * std::max(1.0, std::fabs(l)))
            throw DomainError("z^2 is minus an eigenvalue: resolvent has a pole");
        v[i] = 1.0 / d;
    }
    return kernel_from_spectrum(op, v);
}

double complex_resolvent_formula_check(const SelfAdjointOperator& op, cd z) {
    const auto d = distinct(op.eigensystem().values);
    double worst = 0.0;
    for (double l : d.values) {
        const cd exact = 1.0 / (z * z + l);
        worst = std::max(worst, std::abs(complex_resolvent_quadrature(l, z) - exact));
    }
    return worst;
}

}  // namespace smlab
