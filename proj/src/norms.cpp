#include "smlab/norms.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "smlab/error.hpp"
#include "smlab/linalg.hpp"
#include "smlab/operators.hpp"
#include "smlab/simd/kernels.hpp"

namespace smlab {

namespace {

using cd = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

const double* mu_data(const OperatorKernel& k) { return k.space->mu().data(); }

void check(const OperatorKernel& k) {
    if (!k.space) throw ConfigError("kernel has no space");
    if (k.re.rows() != k.re.cols() || k.size() != k.space->size())
        throw ConfigError("kernel size does not match its space");
    if (!k.is_real() && (k.im.rows() != k.re.rows() || k.im.cols() != k.re.cols()))
        throw ConfigError("kernel planes differ in shape");
}

bool symmetric(const Eigen::MatrixXd& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

double lp_norm(const Eigen::VectorXcd& f, std::span<const double> mu, double p) {
    if (std::isinf(p)) return f.cwiseAbs().maxCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) s += std::pow(std::abs(f(i)), p) * mu[static_cast<std::size_t>(i)];
    return std::pow(s, 1.0 / p);
}

// Unit vector g in L^{p'} with <y, g> = |y|_p.
Eigen::VectorXcd dual(const Eigen::VectorXcd& y, std::span<const double> mu, double p) {
    const double n = lp_norm(y, mu, p);
    Eigen::VectorXcd g(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double a = std::abs(y(i));
        g(i) = a == 0.0 ? cd(0.0) : std::pow(a / n, p - 1.0) * (y(i) / a);
    }
    return g;
}

}  // namespace

OperatorKernel OperatorKernel::identity(SpacePtr space) {
    const auto n = static_cast<Eigen::Index>(space->size());
    OperatorKernel k{space, Eigen::MatrixXd::Zero(n, n), {}};
    for (Eigen::Index x = 0; x < n; ++x) k.re(x, x) = 1.0 / space->mu(static_cast<std::size_t>(x));
    return k;
}

OperatorKernel OperatorKernel::from_table(SpacePtr space, const Eigen::MatrixXd& table) {
    const auto n = static_cast<Eigen::Index>(space->size());
    if (table.rows() != n || table.cols() != n) throw ConfigError("table does not match the space size");
    OperatorKernel k{space, table, {}};
    for (Eigen::Index y = 0; y < n; ++y) k.re.col(y) /= space->mu(static_cast<std::size_t>(y));
    return k;
}

OperatorKernel OperatorKernel::adjoint() const {
    OperatorKernel k{space, re.transpose(), {}};
    if (!is_real()) k.im = -im.transpose();
    return k;
}

OperatorKernel OperatorKernel::compose(const OperatorKernel& other) const {
    if (size() != other.size()) throw ConfigError("compose: size mismatch");
    Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(mu_data(*this), static_cast<Eigen::Index>(size()));
    const Eigen::MatrixXd bre = mu.asDiagonal() * other.re;
    OperatorKernel k{space, re * bre, {}};
    if (!is_real() || !other.is_real()) {
        const Eigen::MatrixXd bim = other.is_real() ? Eigen::MatrixXd::Zero(bre.rows(), bre.cols())
                                                    : Eigen::MatrixXd(mu.asDiagonal() * other.im);
        const Eigen::MatrixXd aim = is_real() ? Eigen::MatrixXd::Zero(re.rows(), re.cols()) : im;
        k.re -= aim * bim;
        k.im = re * bim + aim * bre;
    }
    return k;
}

double OperatorKernel::max_abs() const {
    if (is_real()) return re.cwiseAbs().maxCoeff();
    return (re.array().square() + im.array().square()).sqrt().maxCoeff();
}

double norm_1to1(const OperatorKernel& k) {
    check(k);
    std::vector<double> s(k.size());
    simd::kernels().abs_col_sums(k.re.data(), k.im_data(), k.size(), k.size(), mu_data(k), s.data());
    return *std::max_element(s.begin(), s.end());
}

double norm_infinf(const OperatorKernel& k) {
    check(k);
    std::vector<double> s(k.size());
    simd::kernels().abs_row_sums(k.re.data(), k.im_data(), k.size(), k.size(), mu_data(k), s.data());
    return *std::max_element(s.begin(), s.end());
}

double norm_2toinf(const OperatorKernel& k) {
    check(k);
    std::vector<double> s(k.size());
    simd::kernels().sq_row_sums(k.re.data(), k.im_data(), k.size(), k.size(), mu_data(k), s.data());
    return std::sqrt(*std::max_element(s.begin(), s.end()));
}

double weighted_2toinf(const OperatorKernel& k, const std::vector<double>& v) {
    check(k);
    if (v.size() != k.size()) throw ConfigError("weighted_2toinf: weight count mismatch");
    std::vector<double> s(k.size());
    simd::kernels().sq_row_sums(k.re.data(), k.im_data(), k.size(), k.size(), mu_data(k), s.data());
    double best = 0.0;
    for (std::size_t x = 0; x < s.size(); ++x) best = std::max(best, v[x] * s[x]);
    return std::sqrt(best);
}

double weighted_2toinf(const OperatorKernel& k, double t) {
    if (t < 0.0) throw ConfigError("weighted_2toinf: t must be nonnegative");
    check(k);
    return weighted_2toinf(k, volumes(*k.space, t));
}

double norm_2to2(const OperatorKernel& k) {
    check(k);
    const auto n = static_cast<Eigen::Index>(k.size());
    Eigen::VectorXd sq(n);
    for (Eigen::Index x = 0; x < n; ++x) sq(x) = std::sqrt(k.space->mu(static_cast<std::size_t>(x)));
    if (k.is_real()) {
        Eigen::MatrixXd w = sq.asDiagonal() * k.re * sq.asDiagonal();
        if (symmetric(w)) {
            Eigen::MatrixXd s = 0.5 * (w + w.transpose());
            Eigen::VectorXd ev;
            symmetric_eigen(s, ev, true);
            return std::max(std::fabs(ev(0)), std::fabs(ev(n - 1)));
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(w);
        return svd.singularValues()(0);
    }
    Eigen::MatrixXcd w(n, n);
    w.real() = sq.asDiagonal() * k.re * sq.asDiagonal();
    w.imag() = sq.asDiagonal() * k.im * sq.asDiagonal();
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(w);
    return svd.singularValues()(0);
}

NormInterval norm_ptop(const OperatorKernel& k, double p, const PNormOptions& options) {
    if (!(p >= 1.0)) throw ConfigError("norm_ptop: p must be at least 1");
    check(k);
    if (p == 1.0) {
        const double v = norm_1to1(k);
        return {v, v, true};
    }
    if (std::isinf(p)) {
        const double v = norm_infinf(k);
        return {v, v, true};
    }
    if (p == 2.0) {
        const double v = norm_2to2(k);
        return {v, v, true};
    }
    const double n1 = norm_1to1(k), n2 = norm_2to2(k), ninf = norm_infinf(k);
    NormInterval out;
    if (p < 2.0) {
        const double theta = 2.0 * (1.0 - 1.0 / p);
        out.upper = std::pow(n1, 1.0 - theta) * std::pow(n2, theta);
    } else {
        const double theta = 1.0 - 2.0 / p;
        out.upper = std::pow(n2, 1.0 - theta) * std::pow(ninf, theta);
    }

    const auto n = static_cast<Eigen::Index>(k.size());
    const auto mu = k.space->mu();
    Eigen::MatrixXcd km(n, n);
    km.real() = k.re;
    km.imag() = k.is_real() ? Eigen::MatrixXd::Zero(n, n) : k.im;
    Eigen::VectorXd muv = Eigen::Map<const Eigen::VectorXd>(mu.data(), n);
    auto apply = [&](const Eigen::VectorXcd& f) -> Eigen::VectorXcd { return km * (f.array() * muv.array()).matrix(); };
    auto apply_adj = [&](const Eigen::VectorXcd& g) -> Eigen::VectorXcd {
        return km.adjoint() * (g.array() * muv.array()).matrix();
    };
    double best = 0.0;
    Eigen::VectorXcd best_f;
    auto consider = [&](const Eigen::VectorXcd& f) {
        const double nf = lp_norm(f, mu, p);
        if (!(nf > 0.0)) return;
        const double r = lp_norm(apply(f), mu, p) / nf;
        if (r > best) {
            best = r;
            best_f = f;
        }
    };
    const Eigen::Index stride = std::max<Eigen::Index>(1, n / 64);
    for (Eigen::Index y = 0; y < n; y += stride) {
        Eigen::VectorXcd f = Eigen::VectorXcd::Zero(n);
        f(y) = 1.0;
        consider(f);
    }
    consider(Eigen::VectorXcd::Ones(n));
    for (Eigen::Index x = 0; x < n; x += stride) {
        Eigen::VectorXcd f(n);
        for (Eigen::Index y = 0; y < n; ++y) {
            const cd v = km(x, y);
            f(y) = std::abs(v) > 0.0 ? std::conj(v) / std::abs(v) : cd(1.0);
        }
        consider(f);
    }
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss;
    for (std::size_t r = 0; r < options.random_vectors; ++r) {
        Eigen::VectorXcd f(n);
        for (Eigen::Index y = 0; y < n; ++y) f(y) = k.is_real() ? cd(gauss(rng)) : cd(gauss(rng), gauss(rng));
        consider(f);
    }
    const double q = p / (p - 1.0);
    Eigen::VectorXcd x = best_f;
    for (std::size_t it = 0; it < options.power_iterations && x.size() > 0; ++it) {
        const Eigen::VectorXcd y = apply(x);
        if (lp_norm(y, mu, p) == 0.0) break;
        const Eigen::VectorXcd z = apply_adj(dual(y, mu, p));
        if (lp_norm(z, mu, q) == 0.0) break;
        x = dual(z, mu, q);
        const double before = best;
        consider(x);
        if (best <= before * (1.0 + 1e-14) && it > 2) break;
    }
    out.lower = std::min(best, out.upper);
    out.exact = false;
    return out;
}

DaviesGaffneyResult davies_gaffney_pairs(const SelfAdjointOperator& op, double t,
                                         const std::vector<BallPair>& pairs, double speed) {
    if (!(t > 0.0)) throw ConfigError("davies_gaffney_pairs: t must be positive");
    if (!(speed > 0.0)) throw ConfigError("davies_gaffney_pairs: speed must be positive");
    const auto& space = op.space();
    const Eigensystem& es = op.eigensystem();
    const Eigen::VectorXd decay = (-t * es.values.array()).exp().matrix();
    DaviesGaffneyResult res;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const BallPair& bp = pairs[i];
        if (bp.center1 >= space.size() || bp.center2 >= space.size())
            throw ConfigError("davies_gaffney_pairs: center out of range");
        const auto d1 = space.distances_from(bp.center1);
        const auto d2 = space.distances_from(bp.center2);
        std::vector<Eigen::Index> b1, b2;
        for (std::size_t x = 0; x < space.size(); ++x) {
            if (d1[x] <= bp.radius1 * (1 + 1e-12)) b1.push_back(static_cast<Eigen::Index>(x));
            if (d2[x] <= bp.radius2 * (1 + 1e-12)) b2.push_back(static_cast<Eigen::Index>(x));
        }
        double sep = kInf;
        for (auto x : b1) {
            const auto dx = space.distances_from(static_cast<std::size_t>(x));
            for (auto y : b2) sep = std::min(sep, dx[static_cast<std::size_t>(y)]);
        }
        const double r = sep / speed;
        if (!(r > 0.0)) throw DomainError("davies_gaffney_pairs: balls overlap (r <= 0) in pair " + std::to_string(i));
        Eigen::MatrixXd u1(b1.size(), es.vectors.cols()), u2(b2.size(), es.vectors.cols());
        for (std::size_t a = 0; a < b1.size(); ++a)
            u1.row(static_cast<Eigen::Index>(a)) = es.vectors.row(b1[a]) * std::sqrt(space.mu(static_cast<std::size_t>(b1[a])));
        for (std::size_t a = 0; a < b2.size(); ++a)
            u2.row(static_cast<Eigen::Index>(a)) = es.vectors.row(b2[a]) * std::sqrt(space.mu(static_cast<std::size_t>(b2[a])));
        const Eigen::MatrixXd local = u2 * decay.asDiagonal() * u1.transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(local);
        const double nrm = svd.singularValues()(0);
        const double ratio = std::exp(std::log(nrm) + r * r / (4.0 * t));
        res.rows.push_back({i, r, nrm, ratio});
        res.worst_ratio = std::max(res.worst_ratio, ratio);
    }
    return res;
}

}  // namespace smlab
