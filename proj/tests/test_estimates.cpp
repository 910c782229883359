#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "smlab/calculus.hpp"
#include "smlab/error.hpp"
#include "smlab/estimates.hpp"
#include "smlab/report.hpp"

using namespace smlab;

namespace {

void check_roundtrip(const SuiteReport& r) {
    const SuiteReport back = report_from_json(report_to_json(r, 7));
    const SuiteReport again = reevaluate(back);
    CHECK(again.pass == r.pass);
    CHECK(again.summary.size() == r.summary.size());
    for (std::size_t i = 0; i < r.summary.size(); ++i)
        CHECK(again.summary[i].fitted == doctest::Approx(r.summary[i].fitted).epsilon(1e-15));
    CHECK(again.fits.size() == r.fits.size());
    CHECK(report_to_json(again, 7) == report_to_json(r, 7));
}

std::vector<double> geom(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a * std::pow(b / a, double(i) / (n - 1)));
    return v;
}

}  // namespace

TEST_CASE("spectrum probe on path-3 in the gap (1, 3)") {
    const auto op = laplacian(test::grid(1, 3));
    const auto r = suite_spectrum_probe(op, 2.0, 1.0, {});
    CHECK(r.pass);
    CHECK(r.constants.at("psi_max") <= 1e-12);
    // g(L) acts as (2 - L)^{-1} on eigenvalues 0 and 3: values 1/2 and -1.
    const auto k = apply_multiplier(op, spectrum_probe_function(2.0, 1.0));
    CHECK(r.constants.at("norm") == doctest::Approx(norm_1to1(k)));
    CHECK(std::isfinite(r.constants.at("norm")));
    check_roundtrip(r);
    // rho = 0.5 is within gap/2 of the eigenvalues 0 and 1.
    CHECK_THROWS_AS(suite_spectrum_probe(op, 0.5, 1.0, {}), DomainError);
    // Below the spectrum.
    CHECK(suite_spectrum_probe(op, -1.0, 0.5, {}).pass);
}

TEST_CASE("wave norms at xi = 0 are heat 1->1 norms") {
    const auto op = laplacian(test::grid(1, 20));
    const auto t = geom(0.1, 10.0, 5);
    const auto r = suite_wave(op, {0.0, 1.0, 4.0, 10.0}, t, {});
    const auto xi = r.column("xi"), tt = r.column("t"), norm = r.column("norm");
    int seen = 0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (xi[i] != 0.0) continue;
        CHECK(norm[i] == doctest::Approx(norm_1to1(heat_kernel(op, tt[i]))).epsilon(1e-12));
        ++seen;
    }
    CHECK(seen == 5);
    check_roundtrip(r);
}

TEST_CASE("rsk and heat2inf on a path are flat in t") {
    const auto op = laplacian(test::grid(1, 80));
    const auto t = geom(0.1, 20.0, 25);
    const auto r = suite_rsk(op, t, {});
    CHECK(r.pass);
    CHECK(r.fits.count("kappa") == 1);
    check_roundtrip(r);
    Heat2InfOptions ho;
    ho.sigma = 1.5;
    ho.doubling = true;
    const auto h = suite_heat2inf(op, t, ho);
    CHECK(h.pass);
    check_roundtrip(h);
    CHECK_THROWS_AS(suite_rsk(op, geom(1.0, 10.0, 5), {}), ConfigError);
}

TEST_CASE("locality suite and tampered tables") {
    const auto op = laplacian(test::grid(1, 80));
    const auto r = suite_locality(op, MultiplierFunction::fa(1.0), {5.0, 10.0, 19.0}, {});
    CHECK(r.pass);
    check_roundtrip(r);
    SuiteReport bad = r;
    bad.table[1][1] = 0.5;
    CHECK_FALSE(reevaluate(bad).pass);
}

TEST_CASE("subordination suite") {
    const auto r = suite_subordination({1.0, 2.0}, {0.0, 2.0, 5.0}, {});
    CHECK(r.pass);
    CHECK(r.table.size() == 6);
    check_roundtrip(r);
}

TEST_CASE("tolerance overrides") {
    SubordinationOptions o;
    o.tolerances = {{"residual", -1.0}};
    CHECK_FALSE(suite_subordination({1.0}, {1.0}, o).pass);
    o.tolerances = {{"no_such_tolerance", 1.0}};
    CHECK_THROWS_AS(suite_subordination({1.0}, {1.0}, o), ConfigError);
}

TEST_CASE("pair schedule picks points at the requested distances") {
    const auto s = test::grid(2, 9);
    const auto pairs = make_pair_schedule(*s, 40, {2.0, 3.0, 4.0}, 1.0);
    REQUIRE(pairs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(pairs[i].center1 == 40);
        CHECK(s->distance(40, pairs[i].center2) == doctest::Approx(2.0 + double(i)));
    }
    CHECK_THROWS_AS(make_pair_schedule(*s, 40, {100.0}, 1.0), ConfigError);
}

TEST_CASE("F_a envelope decays like lambda^{-(1+a)}") {
    const auto fit = fa_envelope_fit(2.0, 20.0, 80.0);
    CHECK(fit.slope == doctest::Approx(-3.0).epsilon(0.02));
}

TEST_CASE("every registered suite has a judge") {
    const auto& names = suite_names();
    CHECK(names.size() == 11);
    SuiteReport r;
    r.suite = "unknown";
    CHECK_THROWS_AS(reevaluate(r), ConfigError);
}
