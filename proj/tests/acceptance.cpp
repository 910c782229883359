// Acceptance run: one PASS/FAIL line per criterion. Thresholds and runtime
// limits are fixed here and do not read the suite tolerances.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "helpers.hpp"
#include "smlab/calculus.hpp"
#include "smlab/cli.hpp"
#include "smlab/config.hpp"
#include "smlab/error.hpp"
#include "smlab/estimates.hpp"
#include "smlab/metric_space.hpp"
#include "smlab/operators.hpp"
#include "smlab/simd/kernels.hpp"

using namespace smlab;
namespace fs = std::filesystem;
using cd = std::complex<double>;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] %2d %-28s %6.1fs (limit %4.0fs)  %s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(), secs, limit_s,
                o.detail.c_str(), in_time ? "" : " (over time limit)");
    std::fflush(stdout);
}

SpacePtr ends(int side_small, int torus_side, int side_big) {
    EndsModelParams p;
    p.n = 3;
    p.m = 4;
    p.side_small = side_small;
    p.torus_side = torus_side;
    p.side_big = side_big;
    return std::make_shared<const MetricMeasureSpace>(build_ends_model(p));
}

OperatorLimits big_budget() {
    OperatorLimits l;
    l.eigen_budget = 6000;
    return l;
}

double max_diff(const OperatorKernel& k, const Eigen::MatrixXcd& ref) {
    double d = 0.0;
    for (std::size_t x = 0; x < k.size(); ++x)
        for (std::size_t y = 0; y < k.size(); ++y)
            d = std::max(d, std::abs(k(x, y) - ref(Eigen::Index(x), Eigen::Index(y))));
    return d;
}

double max_diff(const OperatorKernel& a, const OperatorKernel& b) {
    double d = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x)
        for (std::size_t y = 0; y < a.size(); ++y) d = std::max(d, std::abs(a(x, y) - b(x, y)));
    return d;
}

double constant(const SuiteReport& r, const std::string& key) {
    const auto it = r.constants.find(key);
    return it == r.constants.end() ? NAN : it->second;
}

double slope(const SuiteReport& r, const std::string& key) {
    const auto it = r.fits.find(key);
    return it == r.fits.end() ? NAN : it->second.slope;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    std::printf("smlab acceptance (kernels: %s)\n", std::string(simd::isa_name(simd::active_isa())).c_str());

    // Models shared by several criteria; eigensystems are computed once.
    const auto ends_mid = std::make_shared<const SelfAdjointOperator>(laplacian(ends(8, 3, 5), big_budget()));

    criterion(1, "subordination identity", 10, [] {
        std::vector<double> xi;
        for (int i = 0; i <= 32; ++i) xi.push_back(0.25 * i);
        const auto r = suite_subordination({1.0, 2.0, 3.5}, xi, {});
        const double worst = constant(r, "max_residual");
        return Outcome{worst <= 1e-6, "max residual " + num(worst) + " (<= 1e-6)"};
    });

    criterion(2, "F_a envelope decay", 10, [] {
        bool ok = true;
        std::string d;
        for (double a : {1.0, 2.0}) {
            const double s = fa_envelope_fit(a, 20.0, 200.0).slope;
            ok = ok && std::fabs(s + (1.0 + a)) <= 0.05;
            d += "a=" + num(a) + ": " + num(s) + " ";
        }
        return Outcome{ok, d + "(-(1+a) +- 0.05)"};
    });

    criterion(3, "oracle equivalence N<=10", 5, [] {
        const auto w = test::weighted_space();
        const auto op = laplacian(w);
        const Eigen::MatrixXd m = test::operator_matrix(op);
        const auto n = Eigen::Index(op.size());
        double heat = 0.0, res = 0.0, cres = 0.0, formula = 0.0;
        for (double t : {0.05, 0.7, 3.0}) {
            const Eigen::MatrixXd e = test::taylor_exp(-t * m);
            heat = std::max(heat, max_diff(heat_kernel(op, t), test::to_kernel(e, *w).cast<cd>()));
        }
        for (double sigma : {0.7, 1.5, 2.5})
            for (double t : {0.5, 2.0})
                res = std::max(res, max_diff(resolvent_power(op, t, sigma, ResolventPath::spectral),
                                             resolvent_power(op, t, sigma, ResolventPath::quadrature)));
        for (double theta : {0.0, 0.7, 1.4})
            for (double r : {0.3, 2.0}) {
                const cd z = std::polar(r, theta);
                const Eigen::MatrixXcd a = z * z * Eigen::MatrixXcd::Identity(n, n) + m.cast<cd>();
                const Eigen::MatrixXcd inv = a.partialPivLu().inverse();
                cres = std::max(cres, max_diff(complex_time_resolvent(op, z), test::to_kernel(inv, *w)));
                formula = std::max(formula, complex_resolvent_formula_check(op, z));
            }
        const double worst = std::max({heat, res, cres, formula});
        return Outcome{worst <= 1e-8, "heat " + num(heat) + ", resolvent " + num(res) + ", complex " + num(cres) +
                                          ", formula " + num(formula) + " (<= 1e-8)"};
    });

    criterion(4, "locality of F_a(r sqrt L)", 120, [] {
        const auto fa = MultiplierFunction::fa(1.0);
        const auto path = laplacian(test::grid(1, 200));
        const auto square = laplacian(test::grid(2, 40));
        const auto r1 = suite_locality(path, fa, {5, 15, 25, 35, 49}, {});
        const auto r2 = suite_locality(square, fa, {5, 10, 15, 19.5}, {});
        const double l1 = constant(r1, "max_leak"), l2 = constant(r2, "max_leak");
        return Outcome{l1 <= 1e-6 && l2 <= 1e-6, "leak 1D " + num(l1) + ", 2D " + num(l2) + " (<= 1e-6)"};
    });

    criterion(5, "on-diagonal ends decay", 600, [] {
        const auto op = laplacian(ends(10, 4, 6), big_budget());
        std::vector<double> t;
        for (int i = 0; i < 30; ++i) t.push_back(0.5 * std::pow(80.0, i / 29.0));
        OnDiagOptions o;
        const auto r = suite_ondiag(op, t, o);
        const double small = slope(r, "small_t"), large = slope(r, "large_t");
        const bool ok = std::fabs(small + 2.0) <= 0.2 && std::fabs(large + 1.5) <= 0.2;
        return Outcome{ok, "N=" + std::to_string(op.size()) + ", small-t " + num(small) + " (-2 +- 0.2), large-t " +
                               num(large) + " (-1.5 +- 0.2)"};
    });

    criterion(6, "(R_sigma,kappa) exponent", 300, [&] {
        std::vector<double> t;
        for (int i = 0; i <= 40; ++i) t.push_back(0.1 * std::pow(100.0, i / 40.0));
        RskOptions o;
        o.sigma = 1.5;
        o.window_lo = 1.0;
        o.window_hi = 9.0;
        const double k_ends = slope(suite_rsk(*ends_mid, t, o), "kappa");
        RskOptions g;
        g.sigma = 1.5;
        g.kappa = 0.0;
        const double k_grid = slope(suite_rsk(laplacian(test::grid(2, 50)), t, g), "kappa");
        return Outcome{k_ends <= 0.25 + 0.15 && k_grid <= 0.1,
                       "ends " + num(k_ends) + " (<= 0.4), 2D grid " + num(k_grid) + " (<= 0.1)"};
    });

    criterion(7, "wave growth on ends", 600, [&] {
        std::vector<double> t;
        for (int i = 0; i < 7; ++i) t.push_back(0.1 * std::pow(100.0, i / 6.0));
        const auto r = suite_wave(*ends_mid, {0, 1, 2, 4, 8, 16}, t, {});
        const double g = constant(r, "xi_growth"), k = constant(r, "t_growth");
        return Outcome{g <= 1.5 + 0.25 + 0.25 + 0.25 && k <= 0.25 + 0.15,
                       "xi slope " + num(g) + " (<= 2.25), t slope " + num(k) + " (<= 0.4)"};
    });

    criterion(8, "Bochner-Riesz stability", 600, [&] {
        const auto small = laplacian(ends(6, 3, 4), big_budget());
        std::vector<double> t;
        for (int i = 0; i < 7; ++i) t.push_back(std::pow(100.0, i / 6.0));
        MultiplierSuiteOptions o;
        o.s = 5.0;
        o.sigma = 1.5;
        o.kappa = 0.25;
        const auto r = suite_multiplier(small, *ends_mid, MultiplierFunction::bochner_riesz(6.0), t, o);
        const double ratio = constant(r, "C_ratio");
        return Outcome{std::fabs(ratio - 1.0) <= 0.25, "C_large/C_small " + num(ratio) + " (1 +- 0.25)"};
    });

    criterion(9, "resolvent sector bound", 600, [] {
        const auto coarse = laplacian(test::grid(2, 21, 1.0));
        const auto fine = laplacian(test::grid(2, 41, 0.5));
        const auto z = sector_samples({0.1, 1.0, 10.0}, {0.0, 0.3, 0.6, 0.9, 1.2, 1.4});
        SectorOptions o;
        o.sigma = 1.0;
        o.kappa = 0.0;
        const auto r = suite_resolvent_sector(coarse, fine, z, o);
        const double s = constant(r, "angular_slope"), p1 = constant(r, "C_ratio_p1"),
                     pinf = constant(r, "C_ratio_pinf");
        const bool ok = s <= 2.0 + 0.0 + 1.5 + 0.5 && std::fabs(p1 - 1.0) <= 0.25 && std::fabs(pinf - 1.0) <= 0.25;
        return Outcome{ok, "angular slope " + num(s) + " (<= 4), C ratio p=1 " + num(p1) + ", p=inf " + num(pinf) +
                               " (1 +- 0.25)"};
    });

    criterion(10, "Davies-Gaffney decay", 300, [&] {
        std::vector<double> sep;
        for (int i = 0; i < 16; ++i) sep.push_back(3.0 + i);
        const auto& space = ends_mid->space();
        const auto pairs = make_pair_schedule(space, space.compact()[0], sep, 1.0);
        const auto r = suite_dg_decay(*ends_mid, {0.5, 1, 2, 4, 8, 16}, pairs, {});
        const double rate = constant(r, "gaussian_rate"), pre = constant(r, "prefactor_exponent");
        return Outcome{rate >= 0.125 && pre <= 0.5 + 0.3,
                       "rate " + num(rate) + " (>= 1/8), prefactor " + num(pre) + " (<= 0.8)"};
    });

    criterion(11, "Schrodinger heat growth", 900, [] {
        const auto box = test::grid(3, 27, 1.0, Boundary::absorbing);
        PotentialSpec pot;
        pot.coupling = 0.16;
        pot.cutoff = 1.0;
        SchrodingerOptions so;
        so.limits = big_budget();
        so.murata_dim = 3;
        const auto op = schrodinger(box, pot, so);
        const auto reference = laplacian(box, so.limits);
        const double half = 0.5, alpha = half - std::sqrt(half * half - pot.coupling);
        std::vector<double> t;
        for (int i = 0; i < 16; ++i) t.push_back(0.5 * std::pow(32.0, i / 15.0));
        SchrodingerSuiteOptions o;
        o.alpha = alpha;
        o.n = 3.0;
        o.eps = 0.1;
        o.window = {1.0, 8.0};
        const auto r = suite_schrodinger(op, reference, t, o);
        const double e = slope(r, "exponent");
        const double sub = r.measurement("subcritical_min_eig"), tol = r.measurement("tol_psd");
        const bool ok = e >= -0.05 && e <= 0.45 && sub >= -tol;
        return Outcome{ok, "alpha " + num(alpha) + ", exponent " + num(e) + " ([-0.05, 0.45]), min eig of L-0.1V- " +
                               num(sub)};
    });

    criterion(12, "spectrum probe", 60, [] {
        const auto op = laplacian(test::grid(1, 3));
        const auto r = suite_spectrum_probe(op, 2.0, 1.0, {});
        const auto& row = r.table.at(0);
        const double psi = row[r.column_index("psi_max")], norm = row[r.column_index("norm")];
        const bool horm = row[r.column_index("hormander_pass")] != 0.0;
        return Outcome{psi <= 1e-12 && std::isfinite(norm) && horm,
                       "psi " + num(psi) + " (<= 1e-12), norm " + num(norm) + ", hormander " +
                           (horm ? "pass" : "fail")};
    });

    criterion(13, "deterministic reports", 120, [] {
        const fs::path dir = fs::temp_directory_path() / ("smlab_accept_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        const fs::path cfg = dir / "run.ini";
        std::ofstream(cfg) << "[run]\nseed = 7\njobs = 2\n\n[space]\nkind = ends\nside_small = 5\ntorus_side = "
                              "3\nside_big = 3\n\n[suite.heat2inf]\nt = geom(0.1, 10, 21)\nsigma = 1.5\n";
        std::string json[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = dir / ("out" + std::to_string(k));
            std::ostringstream o, e;
            const int code = run_cli({"suite", "heat2inf", "--config", cfg.string(), "--out", out.string()}, o, e);
            if (code != 0 && code != 1) throw Error("run failed: " + e.str());
            json[k] = read_file(out / "heat2inf.json");
        }
        fs::remove_all(dir);
        const bool same = !json[0].empty() && json[0] == json[1];
        return Outcome{same, std::to_string(json[0].size()) + " bytes, " + (same ? "identical" : "different")};
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
