#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "smlab/error.hpp"

using namespace smlab;

TEST_CASE("path-3 spectrum is the root set of its characteristic polynomial") {
    // L = [[1,-1,0],[-1,2,-1],[0,-1,1]], det(L - x) = -x (x - 1) (x - 3).
    const auto op = laplacian(test::grid(1, 3));
    const auto& es = op.eigensystem();
    REQUIRE(es.values.size() == 3);
    const double expect[3] = {0.0, 1.0, 3.0};
    for (int i = 0; i < 3; ++i) CHECK(es.values[i] == doctest::Approx(expect[i]).scale(1.0).epsilon(1e-13));
    for (int i = 0; i < 3; ++i) {
        const double x = es.values[i];
        CHECK(std::fabs(-x * (x - 1.0) * (x - 3.0)) < 1e-12);
    }
}

TEST_CASE("Laplacian matrix matches the edge formula") {
    const auto w = test::weighted_space();
    const auto op = laplacian(w);
    const auto m = test::operator_matrix(op);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(6, 6);
    for (const auto& e : w->edges()) {
        const auto a = Eigen::Index(e.a), b = Eigen::Index(e.b);
        expect(a, a) += e.conductance / w->mu(e.a);
        expect(b, b) += e.conductance / w->mu(e.b);
        expect(a, b) -= e.conductance / w->mu(e.a);
        expect(b, a) -= e.conductance / w->mu(e.b);
    }
    CHECK((m - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("eigenvectors are mu-orthonormal eigenpairs of the operator") {
    const auto w = test::weighted_space();
    const auto op = laplacian(w);
    const auto m = test::operator_matrix(op);
    const auto& es = op.eigensystem();
    Eigen::VectorXd mu(6);
    for (int i = 0; i < 6; ++i) mu[i] = w->mu(std::size_t(i));
    const Eigen::MatrixXd gram = es.vectors.transpose() * mu.asDiagonal() * es.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd resid = m * es.vectors - es.vectors * es.values.asDiagonal();
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-12);
    // Independent route: eigenvalues of the non-symmetric matrix mu^{-1} A.
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
    std::vector<double> ev;
    for (int i = 0; i < 6; ++i) ev.push_back(solver.eigenvalues()[i].real());
    std::sort(ev.begin(), ev.end());
    for (int i = 0; i < 6; ++i) CHECK(es.values[i] == doctest::Approx(ev[std::size_t(i)]).scale(1.0).epsilon(1e-10));
    CHECK(op.lambda_min() >= -op.tol_psd());
    CHECK(op.lambda_max_bound() >= es.values[5] - 1e-12);
}

TEST_CASE("reflection-reduced diagonal sums equal the full ones") {
    for (Boundary b : {Boundary::free, Boundary::absorbing}) {
        const auto s = test::grid(2, 9, 1.0, b);
        const auto full = laplacian(s);
        OperatorLimits tight;
        tight.eigen_budget = 40;
        const auto reduced = laplacian(s, tight);
        for (double t : {0.1, 1.0, 5.0}) {
            auto w = [t](double l) { return std::exp(-t * l); };
            const auto a = full.diagonal_spectrum().diagonal(w);
            const auto r = reduced.diagonal_spectrum().diagonal(w);
            REQUIRE(a.size() == r.size());
            for (std::size_t x = 0; x < a.size(); ++x) CHECK(r[x] == doctest::Approx(a[x]).epsilon(1e-10));
        }
        CHECK(reduced.lambda_min() == doctest::Approx(full.lambda_min()).scale(1.0).epsilon(1e-10));
        CHECK(reduced.diagonal_spectrum().num_eigenvalues() == s->size());
    }
}

TEST_CASE("Schrodinger operator admissibility and subcriticality") {
    const auto box = test::grid(3, 9, 1.0, Boundary::absorbing);
    PotentialSpec pot;
    pot.coupling = 0.16;
    SchrodingerOptions so;
    so.murata_dim = 3;
    const auto op = schrodinger(box, pot, so);
    REQUIRE(op.potential());
    CHECK(op.lambda_min() > 0.0);
    // L - eps V- adds the nonpositive potential -eps V-: the bottom drops but stays >= 0.
    const auto s0 = check_subcritical(op, 0.0);
    const auto s1 = check_subcritical(op, 0.1);
    CHECK(s0.min_eig == doctest::Approx(op.lambda_min()).epsilon(1e-9));
    CHECK(s1.min_eig <= s0.min_eig + 1e-12);
    CHECK(s1.min_eig > 0.0);
    CHECK(s1.pass);

    PotentialSpec too_strong;
    too_strong.coupling = 0.3;
    CHECK_THROWS_AS(schrodinger(box, too_strong, so), ConfigError);
    CHECK_THROWS_AS(check_subcritical(laplacian(box), 0.1), ConfigError);
}

// |x| is the graph distance to the centre point, the l1 norm on a unit grid.
TEST_CASE("potential values follow -c/|x|^2 outside the cutoff") {
    const auto box = test::grid(3, 7, 1.0, Boundary::absorbing);
    PotentialSpec pot;
    pot.coupling = 0.2;
    pot.cutoff = 1.0;
    const auto op = schrodinger(box, pot);
    const auto& v = op.potential()->values;
    const auto& lat = *box->lattice();
    for (std::size_t x = 0; x < box->size(); ++x) {
        const auto c = lat.coord(x);
        double r = 0.0;
        for (int d = 0; d < 3; ++d) r += std::abs(c[d] - 3);
        const double expect = r > 1.0 ? -0.2 / (r * r) : 0.0;
        REQUIRE(v[x] == doctest::Approx(expect));
        REQUIRE(op.potential()->positive[x] - op.potential()->negative[x] == doctest::Approx(v[x]));
    }
}

TEST_CASE("resonance exponent grows with the coupling") {
    const auto box = test::grid(3, 15, 1.0, Boundary::absorbing);
    // Ground states come from the symmetric sector of the reflection reduction.
    SchrodingerOptions so;
    so.limits.eigen_budget = 600;
    double prev = 0.0;
    for (double c : {0.05, 0.15, 0.24}) {
        PotentialSpec pot;
        pot.coupling = c;
        const auto res = resonance_proxy(schrodinger(box, pot, so));
        CHECK(res.alpha_fit > prev);
        CHECK(res.alpha_fit < 0.5);
        prev = res.alpha_fit;
    }
}

TEST_CASE("eigensystem cache round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "smlab_cache_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "op.eig").string();
    const auto w = test::weighted_space();
    const auto a = laplacian(w);
    save_eigensystem(path, a);
    const auto b = laplacian(w);
    CHECK(load_eigensystem(path, b));
    CHECK(b.has_eigensystem());
    CHECK((b.eigensystem().values - a.eigensystem().values).cwiseAbs().maxCoeff() == 0.0);
    const auto other = laplacian(test::grid(1, 6));
    CHECK_FALSE(load_eigensystem(path, other));
    CHECK_FALSE(load_eigensystem((dir / "missing.eig").string(), other));
    std::filesystem::remove_all(dir);
}

TEST_CASE("budget error above the eigen budget without symmetry") {
    OperatorLimits tight;
    tight.eigen_budget = 3;
    const auto op = laplacian(test::weighted_space(), tight);
    CHECK_THROWS_AS(op.eigensystem(), BudgetError);
}
