#include "smlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include "smlab/error.hpp"

namespace smlab {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> kronrod(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const T fc = f(c);
    T k = fc * kWgk[7];
    T g = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const T f1 = f(c - dx), f2 = f(c + dx);
        k += (f1 + f2) * kWgk[j];
        if (j % 2 == 1) g += (f1 + f2) * kWg[j / 2];
    }
    k *= h;
    g *= h;
    return {a, b, k, std::abs(k - g)};
}

template <class T, class F>
QuadratureResult<T> integrate_impl(const F& f, double a, double b, const QuadratureOptions& opt) {
    QuadratureResult<T> res;
    if (!(a <= b)) throw ConfigError("integrate: lower limit exceeds upper limit");
    if (a == b) return res;
    std::vector<double> cuts{a};
    for (double x = a; x < b;) {
        double w = std::min(opt.max_panel, b - a);
        if (opt.frequency) {
            const double fr = opt.frequency(x);
            if (fr > 0.0) w = std::min(w, std::numbers::pi / (4.0 * fr));
        }
        x = std::min(b, x + w);
        cuts.push_back(x);
        if (cuts.size() > opt.max_intervals)
            throw NumericalError("integrate: initial panel count exceeds max_intervals");
    }
    std::priority_queue<Panel<T>> heap;
    T total{};
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto p = kronrod<T>(f, cuts[i], cuts[i + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    res.evaluations = 15 * heap.size();
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (heap.size() >= opt.max_intervals)
            throw NumericalError("integrate: no convergence to tolerance " + std::to_string(opt.abs_tol) +
                                 " (error estimate " + std::to_string(err) + ")");
        Panel<T> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw NumericalError("integrate: interval underflow at x = " + std::to_string(worst.a));
        auto l = kronrod<T>(f, worst.a, mid);
        auto r = kronrod<T>(f, mid, worst.b);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        res.evaluations += 30;
    }
    // Re-sum to remove drift from incremental updates.
    T sum{};
    double esum = 0.0;
    res.intervals = heap.size();
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    res.value = sum;
    res.error = esum;
    if (!std::isfinite(std::abs(sum))) throw NumericalError("integrate: non-finite result");
    return res;
}

double truncation_point(double a, const RealFn& envelope, double tol) {
    double s = std::max(1.0, a + 1.0);
    for (int i = 0; i < 200; ++i) {
        if (envelope(s) * std::max(s, 1.0) <= tol) return s;
        s *= 1.5;
    }
    throw NumericalError("integrate_to_infinity: envelope does not decay");
}

}  // namespace

QuadratureResult<double> integrate(const RealFn& f, double a, double b, const QuadratureOptions& opt) {
    return integrate_impl<double>(f, a, b, opt);
}

QuadratureResult<std::complex<double>> integrate(const ComplexFn& f, double a, double b,
                                                 const QuadratureOptions& opt) {
    return integrate_impl<std::complex<double>>(f, a, b, opt);
}

QuadratureResult<double> integrate_to_infinity(const RealFn& f, double a, const RealFn& envelope,
                                               const QuadratureOptions& opt) {
    return integrate_impl<double>(f, a, truncation_point(a, envelope, 0.01 * opt.abs_tol), opt);
}

QuadratureResult<std::complex<double>> integrate_to_infinity(const ComplexFn& f, double a,
                                                             const RealFn& envelope,
                                                             const QuadratureOptions& opt) {
    return integrate_impl<std::complex<double>>(f, a, truncation_point(a, envelope, 0.01 * opt.abs_tol),
                                                opt);
}

GaussRule gauss_legendre(std::size_t n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace smlab
