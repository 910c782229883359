#include <cmath>
#include <vector>

#include "doctest.h"
#include "smlab/error.hpp"
#include "smlab/fit.hpp"

using namespace smlab;

TEST_CASE("power law fit recovers an exact exponent") {
    std::vector<double> x, y;
    for (double v = 0.5; v < 50.0; v *= 1.3) {
        x.push_back(v);
        y.push_back(3.0 * std::pow(v, -1.5));
    }
    const auto fit = fit_power_law(x, y, 1.0, 20.0);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.residual_rms < 1e-12);
    CHECK(fit.window_lo == 1.0);
    CHECK(fit.window_hi == 20.0);
    std::size_t inside = 0;
    for (double v : x) inside += (v >= 1.0 && v <= 20.0);
    CHECK(fit.n_points == inside);
}

TEST_CASE("power law fit rejects degenerate input") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(fit_power_law(x, std::vector<double>{1.0, 2.0, 3.0, 4.0}, 1.0, 2.0), ConfigError);
    CHECK_THROWS_AS(fit_power_law(x, std::vector<double>{1.0, -2.0, 3.0, 4.0}, 1.0, 4.0), ConfigError);
    CHECK_THROWS_AS(fit_power_law(x, std::vector<double>{1.0, 2.0, 3.0, 4.0}, 3.0, 2.0), ConfigError);
}

TEST_CASE("least squares solves an exactly determined model") {
    std::vector<double> c0, c1, c2, y;
    for (int i = 0; i < 10; ++i) {
        const double t = 0.3 * i;
        c0.push_back(1.0);
        c1.push_back(t);
        c2.push_back(t * t);
        y.push_back(2.0 - 0.5 * t + 0.25 * t * t);
    }
    const auto fit = least_squares({c0, c1, c2}, y);
    REQUIRE(fit.coef.size() == 3);
    CHECK(fit.coef[0] == doctest::Approx(2.0));
    CHECK(fit.coef[1] == doctest::Approx(-0.5));
    CHECK(fit.coef[2] == doctest::Approx(0.25));
    CHECK(fit.residual_rms < 1e-12);
}
