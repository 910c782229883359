#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "smlab/error.hpp"
#include "smlab/multiplier.hpp"
#include "smlab/quadrature.hpp"

using namespace smlab;

namespace {

// c_a * int_{-1}^{1} (1 - u^2)^a cos(lambda u) du with c_a fixed by
// F_a(0) = 1 / (Gamma(a + 3/2) 4^{a + 3/2}). The substitution u = sin(theta)
// gives the smooth integrand cos^{2a+1}(theta) cos(lambda sin(theta)),
// summed by composite Gauss-Legendre.
double f_a_oracle(double a, double lambda) {
    const auto rule = gauss_legendre(32);
    const double half_pi = std::numbers::pi / 2.0;
    auto integral = [&](double l) {
        const int panels = 64;
        double sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double lo = -half_pi + 2.0 * half_pi * p / panels, hi = lo + 2.0 * half_pi / panels;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double th = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[i];
                sum += 0.5 * (hi - lo) * rule.weights[i] * std::pow(std::cos(th), 2.0 * a + 1.0) *
                       std::cos(l * std::sin(th));
            }
        }
        return sum;
    };
    const double f0 = 1.0 / (std::tgamma(a + 1.5) * std::pow(4.0, a + 1.5));
    return f0 * integral(lambda) / integral(0.0);
}

}  // namespace

TEST_CASE("F_a matches its defining integral") {
    for (double a : {0.5, 1.0, 2.0, 3.5})
        for (double l : {0.0, 0.3, 2.0, 7.5, 25.0})
            CHECK(f_a(a, l) == doctest::Approx(f_a_oracle(a, l)).scale(f_a(a, 0.0)).epsilon(1e-10));
}

TEST_CASE("smooth step") {
    CHECK(smooth_step(-1.0) == 0.0);
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
    for (double x = 0.05; x < 1.0; x += 0.1) CHECK(smooth_step(x) + smooth_step(1.0 - x) == doctest::Approx(1.0));
}

TEST_CASE("dyadic pieces sum to one") {
    for (double l : {0.0, 0.1, 0.7, 1.0, 3.3, 17.0, 100.0}) {
        double sum = dyadic_phi0(l);
        for (int k = 1; k < 30; ++k) sum += dyadic_phi(std::ldexp(l, -k));
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(dyadic_phi(0.2) == 0.0);
    CHECK(dyadic_phi(1.1) == 0.0);
    const auto f = MultiplierFunction::gaussian();
    const auto parts = dyadic_partition(f, 5);
    REQUIRE(parts.size() == 6);
    for (double l : {0.0, 0.5, 3.0, 15.0}) {
        std::complex<double> sum = 0.0;
        for (const auto& p : parts) sum += p(l);
        CHECK(sum.real() == doctest::Approx(std::exp(-l)).epsilon(1e-13));
    }
}

TEST_CASE("family values") {
    CHECK(MultiplierFunction::constant(2.5)(7.0).real() == 2.5);
    CHECK(MultiplierFunction::gaussian()(2.0).real() == doctest::Approx(std::exp(-2.0)));
    const auto og = MultiplierFunction::osc_gaussian(3.0)(0.5);
    CHECK(og.real() == doctest::Approx(std::cos(1.5) * std::exp(-0.5)));
    CHECK(og.imag() == doctest::Approx(std::sin(1.5) * std::exp(-0.5)));
    CHECK(MultiplierFunction::resolvent_power(1.5)(3.0).real() == doctest::Approx(std::pow(4.0, -1.5)));
    const auto br = MultiplierFunction::bochner_riesz(2.0);
    CHECK(br(0.5).real() == doctest::Approx(0.25));
    CHECK(br(1.5).real() == 0.0);
    REQUIRE(br.declared_support());
    CHECK(br.declared_support()->hi == doctest::Approx(1.0));
    const auto bump = MultiplierFunction::bump(2.0, 1.0);
    CHECK(bump(2.4).real() == doctest::Approx(1.0));
    CHECK(bump(3.01).real() == 0.0);
    CHECK(MultiplierFunction::fa(1.0).bandlimit().value() == 1.0);
}

TEST_CASE("dilation and products") {
    const auto g = MultiplierFunction::gaussian();
    CHECK(g.dilated(3.0)(2.0).real() == doctest::Approx(std::exp(-6.0)));
    const auto p = g.times(MultiplierFunction::resolvent_power(1.0), "g*r");
    CHECK(p(1.0).real() == doctest::Approx(std::exp(-1.0) / 2.0));
}

TEST_CASE("families by name") {
    const auto f = multiplier_from_params("bochner_riesz", {{"delta", 3.0}});
    CHECK(f.family() == MultiplierFunction::Family::bochner_riesz);
    CHECK(f(0.5).real() == doctest::Approx(0.125));
    CHECK(multiplier_param_names("bump") == std::vector<std::string>{"center", "half_width"});
    CHECK(multiplier_param_names("gaussian").empty());
    CHECK_THROWS_AS(multiplier_param_names("nope"), ConfigError);
    CHECK_THROWS_AS(multiplier_from_params("nope", {}), ConfigError);
    CHECK_THROWS_AS(multiplier_from_params("bochner_riesz", {}), ConfigError);
}

TEST_CASE("tabulated multipliers interpolate and check resolution") {
    std::vector<double> l, v;
    for (int i = 0; i <= 100; ++i) {
        l.push_back(0.01 * i);
        v.push_back(1.0 - 0.01 * i);
    }
    const auto t = MultiplierFunction::tabulated(l, v);
    CHECK(t(0.255).real() == doctest::Approx(0.745));
    CHECK(t(2.0).real() == 0.0);
    std::vector<double> coarse_l{0.0, 1.0, 2.0}, coarse_v{0.0, 1.0, 0.0};
    CHECK_THROWS_AS(MultiplierFunction::tabulated(coarse_l, coarse_v), DomainError);

    const auto path = std::filesystem::temp_directory_path() / "smlab_table.txt";
    {
        std::ofstream f(path);
        f << "# lambda value\n0 1\n0.5 0.5\n1 0\n";
    }
    const auto loaded = load_tabulated(path.string(), 1e-3);
    CHECK(loaded(0.25).real() == doctest::Approx(0.75));
    std::filesystem::remove(path);
}
