#include <cmath>
#include <numbers>

#include "doctest.h"
#include "smlab/error.hpp"
#include "smlab/quadrature.hpp"

using namespace smlab;

TEST_CASE("Gauss-Kronrod on closed-form integrals") {
    CHECK(integrate(RealFn([](double x) { return std::sin(x); }), 0.0, std::numbers::pi).value ==
          doctest::Approx(2.0).epsilon(1e-12));
    QuadratureOptions o;
    o.abs_tol = 1e-12;
    o.frequency = [](double) { return 50.0; };
    const auto r = integrate(RealFn([](double x) { return std::cos(50.0 * x); }), 0.0, 100.0, o);
    CHECK(r.value == doctest::Approx(std::sin(5000.0) / 50.0).scale(1.0).epsilon(1e-10));
    // Endpoint singularity x^{-1/2} on [0, 1] integrates to 2.
    o.frequency = {};
    o.abs_tol = 1e-9;
    CHECK(integrate(RealFn([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }), 0.0, 1.0, o).value ==
          doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("complex integrand") {
    using cd = std::complex<double>;
    const auto r = integrate([](double x) { return std::exp(cd(0.0, x)); }, 0.0, std::numbers::pi / 2);
    CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.value.imag() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("semi-infinite range with an envelope") {
    QuadratureOptions o;
    o.abs_tol = 1e-12;
    const auto r = integrate_to_infinity(RealFn([](double s) { return s * s * std::exp(-s); }), 0.0,
                                         RealFn([](double s) { return s * s * std::exp(-s); }), o);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-11));
    // Gamma(7/2) = 15 sqrt(pi) / 8
    const auto g = integrate_to_infinity(RealFn([](double s) { return std::pow(s, 2.5) * std::exp(-s); }), 0.0,
                                         RealFn([](double s) { return std::pow(s, 2.5) * std::exp(-s); }), o);
    CHECK(g.value == doctest::Approx(std::tgamma(3.5)).epsilon(1e-10));
}

TEST_CASE("non-convergence is reported") {
    QuadratureOptions o;
    o.abs_tol = 1e-14;
    o.max_intervals = 20;
    CHECK_THROWS_AS(integrate(RealFn([](double x) { return std::sin(1.0 / (x + 1e-6)); }), 0.0, 1.0, o), NumericalError);
    CHECK_THROWS_AS(integrate(RealFn([](double x) { return x; }), 1.0, 0.0), ConfigError);
}

TEST_CASE("Gauss-Legendre rule is exact to degree 2n-1") {
    for (std::size_t n : {1u, 4u, 16u}) {
        const auto rule = gauss_legendre(n);
        for (std::size_t k = 0; k <= 2 * n - 1; ++k) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], double(k));
            const double expect = k % 2 ? 0.0 : 2.0 / double(k + 1);
            CHECK(sum == doctest::Approx(expect).scale(1.0).epsilon(1e-13));
        }
    }
}
