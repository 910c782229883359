#include "smlab/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>

#include "smlab/error.hpp"
#include "smlab/linalg.hpp"
#include "smlab/simd/kernels.hpp"

namespace smlab {

namespace {

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t table_hash(std::uint64_t space_hash, const SparseTable& t, double shift) {
    std::uint64_t h = fnv_mix(0xcbf29ce484222325ull, space_hash);
    for (Eigen::Index r = 0; r < t.outerSize(); ++r)
        for (SparseTable::InnerIterator it(t, r); it; ++it) {
            h = fnv_mix(h, static_cast<std::uint64_t>(it.row()));
            h = fnv_mix(h, static_cast<std::uint64_t>(it.col()));
            h = fnv_mix(h, std::bit_cast<std::uint64_t>(it.value()));
        }
    return fnv_mix(h, std::bit_cast<std::uint64_t>(shift));
}

// S = M^{1/2} A M^{-1/2}, symmetric when A is mu-self-adjoint.
Eigen::MatrixXd symmetrized(const MetricMeasureSpace& space, const SparseTable& table) {
    const auto n = static_cast<Eigen::Index>(space.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index x = 0; x < n; ++x)
        for (SparseTable::InnerIterator it(table, x); it; ++it)
            s(x, it.col()) = std::sqrt(space.mu(static_cast<std::size_t>(x))) * it.value() /
                             std::sqrt(space.mu(static_cast<std::size_t>(it.col())));
    return 0.5 * (s + s.transpose());
}

double gershgorin_upper(const SparseTable& table) {
    double best = 0.0;
    for (Eigen::Index x = 0; x < table.outerSize(); ++x) {
        double r = 0.0;
        for (SparseTable::InnerIterator it(table, x); it; ++it)
            r += it.col() == x ? it.value() : std::fabs(it.value());
        best = std::max(best, r);
    }
    return best;
}

bool is_z_matrix(const SparseTable& table) {
    for (Eigen::Index x = 0; x < table.outerSize(); ++x)
        for (SparseTable::InnerIterator it(table, x); it; ++it)
            if (it.col() != x && it.value() > 0.0) return false;
    return true;
}

void check_budget(std::size_t n, const OperatorLimits& limits) {
    if (n > limits.eigen_budget)
        throw BudgetError("dense eigendecomposition of size " + std::to_string(n) +
                          " exceeds eigen budget " + std::to_string(limits.eigen_budget));
}

// Ground state of the table (lowest eigenpair), as a function on the points.
std::pair<double, Eigen::VectorXd> ground_state(const MetricMeasureSpace& space,
                                                const SparseTable& table,
                                                const OperatorLimits& limits) {
    if (space.size() <= limits.eigen_budget) {
        Eigen::MatrixXd s = symmetrized(space, table);
        Eigen::VectorXd w;
        symmetric_eigen(s, w);
        Eigen::VectorXd g = s.col(0);
        for (Eigen::Index x = 0; x < g.size(); ++x) g(x) /= std::sqrt(space.mu(static_cast<std::size_t>(x)));
        return {w(0), g};
    }
    if (!is_z_matrix(table))
        throw BudgetError("ground state of a non-Z-matrix above the eigen budget is not supported");
    ReflectionReduction red(space, table);
    Eigen::MatrixXd b = red.block(red.trivial_sector());
    check_budget(static_cast<std::size_t>(b.rows()), limits);
    Eigen::VectorXd w;
    symmetric_eigen(b, w);
    return {w(0), red.lift(red.trivial_sector(), b.col(0))};
}

}  // namespace

// ---------------------------------------------------------------- spectrum

double DiagonalSpectrum::min_eigenvalue() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks)
        if (b.values.size() > 0) v = std::min(v, b.values.minCoeff());
    return v;
}

double DiagonalSpectrum::max_eigenvalue() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& b : blocks)
        if (b.values.size() > 0) v = std::max(v, b.values.maxCoeff());
    return v;
}

std::size_t DiagonalSpectrum::num_eigenvalues() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += static_cast<std::size_t>(b.values.size());
    return n;
}

std::vector<double> DiagonalSpectrum::diagonal(const std::function<double(double)>& w) const {
    std::vector<double> class_sum(num_classes, 0.0);
    const auto& k = simd::kernels();
    std::vector<double> coeff, tmp;
    for (const auto& b : blocks) {
        const auto m = static_cast<std::size_t>(b.values.size());
        coeff.resize(m);
        for (std::size_t i = 0; i < m; ++i) coeff[i] = w(b.values(static_cast<Eigen::Index>(i)));
        tmp.resize(b.classes.size());
        k.gemv(b.squared.data(), b.classes.size(), m, coeff.data(), tmp.data());
        for (std::size_t a = 0; a < b.classes.size(); ++a) class_sum[b.classes[a]] += tmp[a];
    }
    std::vector<double> out(point_class.size());
    for (std::size_t x = 0; x < out.size(); ++x) out[x] = class_sum[point_class[x]];
    return out;
}

// ---------------------------------------------------------------- operator

struct SelfAdjointOperator::Cache {
    std::mutex mutex;
    std::optional<Eigensystem> eigen;
    std::optional<DiagonalSpectrum> diag;
    std::optional<double> lambda_min;
};

SelfAdjointOperator::SelfAdjointOperator(SpacePtr space, SparseTable table,
                                         std::optional<Potential> potential, double shift,
                                         OperatorLimits limits)
    : space_(std::move(space)),
      table_(std::move(table)),
      potential_(std::move(potential)),
      shift_(shift),
      limits_(limits),
      cache_(std::make_unique<Cache>()) {
    if (!space_) throw ConfigError("operator needs a space");
    const auto n = static_cast<Eigen::Index>(space_->size());
    if (table_.rows() != n || table_.cols() != n)
        throw ConfigError("coefficient table does not match the space size");
    table_.makeCompressed();
    // mu(x) A_xy = mu(y) A_yx
    for (Eigen::Index x = 0; x < n; ++x)
        for (SparseTable::InnerIterator it(table_, x); it; ++it) {
            const double lhs = space_->mu(static_cast<std::size_t>(x)) * it.value();
            const double rhs = space_->mu(static_cast<std::size_t>(it.col())) * table_.coeff(it.col(), x);
            if (std::fabs(lhs - rhs) > 1e-12 * std::max(std::fabs(lhs), std::fabs(rhs)))
                throw ConfigError("coefficient table is not mu-self-adjoint");
        }
    hash_ = table_hash(space_->content_hash(), table_, shift_);
}

SelfAdjointOperator::SelfAdjointOperator(SelfAdjointOperator&&) noexcept = default;
SelfAdjointOperator& SelfAdjointOperator::operator=(SelfAdjointOperator&&) noexcept = default;
SelfAdjointOperator::~SelfAdjointOperator() = default;

Eigen::MatrixXd SelfAdjointOperator::dense_table() const { return Eigen::MatrixXd(table_); }

void SelfAdjointOperator::apply(std::span<const double> f, std::span<double> out) const {
    if (f.size() != size() || out.size() != size()) throw ConfigError("apply: size mismatch");
    for (Eigen::Index x = 0; x < table_.outerSize(); ++x) {
        double s = 0.0;
        for (SparseTable::InnerIterator it(table_, x); it; ++it) s += it.value() * f[static_cast<std::size_t>(it.col())];
        out[static_cast<std::size_t>(x)] = s;
    }
}

const Eigensystem& SelfAdjointOperator::eigensystem() const {
    std::lock_guard lock(cache_->mutex);
    if (!cache_->eigen) {
        check_budget(size(), limits_);
        Eigen::MatrixXd s = symmetrized(*space_, table_);
        Eigen::VectorXd w;
        symmetric_eigen(s, w);
        for (Eigen::Index x = 0; x < s.rows(); ++x)
            s.row(x) /= std::sqrt(space_->mu(static_cast<std::size_t>(x)));
        cache_->eigen = Eigensystem{std::move(w), std::move(s)};
    }
    return *cache_->eigen;
}

bool SelfAdjointOperator::has_eigensystem() const {
    std::lock_guard lock(cache_->mutex);
    return cache_->eigen.has_value();
}

void SelfAdjointOperator::adopt_eigensystem(Eigensystem es) const {
    if (static_cast<std::size_t>(es.values.size()) != size() ||
        static_cast<std::size_t>(es.vectors.rows()) != size() ||
        es.vectors.cols() != es.vectors.rows())
        throw ConfigError("adopted eigensystem has the wrong size");
    std::lock_guard lock(cache_->mutex);
    cache_->eigen = std::move(es);
}

const DiagonalSpectrum& SelfAdjointOperator::diagonal_spectrum() const {
    if (size() <= limits_.eigen_budget) {
        const Eigensystem& es = eigensystem();
        std::lock_guard lock(cache_->mutex);
        if (!cache_->diag) {
            DiagonalSpectrum d;
            d.num_classes = size();
            d.point_class.resize(size());
            for (std::size_t x = 0; x < size(); ++x) d.point_class[x] = x;
            DiagonalSpectrum::Block b;
            b.values = es.values;
            b.squared = es.vectors.array().square().matrix();
            b.classes = d.point_class;
            d.blocks.push_back(std::move(b));
            cache_->diag = std::move(d);
        }
        return *cache_->diag;
    }
    std::lock_guard lock(cache_->mutex);
    if (!cache_->diag) {
        ReflectionReduction red(*space_, table_);
        check_budget(red.max_block(), limits_);
        DiagonalSpectrum d;
        d.num_classes = red.num_orbits();
        d.point_class.assign(red.point_orbit().begin(), red.point_orbit().end());
        std::vector<std::size_t> rep_of(red.num_orbits());
        for (std::size_t x = size(); x-- > 0;) rep_of[d.point_class[x]] = x;
        for (std::size_t s = 0; s < red.num_sectors(); ++s) {
            const auto orbits = red.sector_orbits(s);
            if (orbits.empty()) continue;
            Eigen::MatrixXd b = red.block(s);
            DiagonalSpectrum::Block blk;
            symmetric_eigen(b, blk.values);
            blk.squared.resize(b.rows(), b.cols());
            for (Eigen::Index a = 0; a < b.rows(); ++a) {
                const std::size_t o = orbits[static_cast<std::size_t>(a)];
                const double scale = 1.0 / (static_cast<double>(red.orbit_size(o)) * space_->mu(rep_of[o]));
                blk.squared.row(a) = b.row(a).array().square().matrix() * scale;
            }
            blk.classes.assign(orbits.begin(), orbits.end());
            d.blocks.push_back(std::move(blk));
        }
        cache_->diag = std::move(d);
    }
    return *cache_->diag;
}

double SelfAdjointOperator::lambda_min() const {
    if (size() <= limits_.eigen_budget) return eigensystem().values(0);
    std::lock_guard lock(cache_->mutex);
    if (!cache_->lambda_min) cache_->lambda_min = lowest_eigenvalue(*space_, table_, limits_);
    return *cache_->lambda_min;
}

double SelfAdjointOperator::lambda_max_bound() const {
    if (size() <= limits_.eigen_budget) return eigensystem().values(eigensystem().values.size() - 1);
    return gershgorin_upper(table_);
}

double SelfAdjointOperator::tol_psd() const {
    return 1e-10 * std::max(std::fabs(lambda_max_bound()), std::numeric_limits<double>::min());
}

namespace {

SparseTable laplacian_table(const MetricMeasureSpace& space) {
    const std::size_t n = space.size();
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t x = 0; x < n; ++x) {
        double diag = space.killing()[x];
        for (const auto& nb : space.neighbors(x)) {
            diag += nb.conductance;
            trip.emplace_back(static_cast<int>(x), static_cast<int>(nb.y), -nb.conductance / space.mu(x));
        }
        trip.emplace_back(static_cast<int>(x), static_cast<int>(x), diag / space.mu(x));
    }
    SparseTable t(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    t.setFromTriplets(trip.begin(), trip.end());
    return t;
}

SparseTable add_diagonal(const SparseTable& t, const std::vector<double>& d) {
    SparseTable diag(t.rows(), t.cols());
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t x = 0; x < d.size(); ++x)
        if (d[x] != 0.0) trip.emplace_back(static_cast<int>(x), static_cast<int>(x), d[x]);
    diag.setFromTriplets(trip.begin(), trip.end());
    SparseTable out = t + diag;
    out.makeCompressed();
    return out;
}

}  // namespace

SelfAdjointOperator laplacian(SpacePtr space, OperatorLimits limits) {
    if (!space) throw ConfigError("laplacian needs a space");
    SparseTable t = laplacian_table(*space);
    return SelfAdjointOperator(std::move(space), std::move(t), std::nullopt, 0.0, limits);
}

SelfAdjointOperator schrodinger(SpacePtr space, const PotentialSpec& pot,
                                const SchrodingerOptions& options) {
    if (!space) throw ConfigError("schrodinger needs a space");
    if (pot.coupling < 0.0) throw ConfigError("schrodinger: coupling c must be nonnegative");
    if (!(pot.cutoff > 0.0)) throw ConfigError("schrodinger: cutoff must be positive");
    if (options.murata_dim) {
        const double half = (*options.murata_dim - 2) / 2.0;
        if (!(pot.coupling > 0.0) || pot.coupling > half * half)
            throw ConfigError("schrodinger: coupling must lie in (0, ((n-2)/2)^2]");
    }
    const auto radial = space->radial();
    Potential p;
    p.spec = pot;
    p.values.resize(space->size());
    p.positive.assign(space->size(), 0.0);
    p.negative.assign(space->size(), 0.0);
    for (std::size_t x = 0; x < space->size(); ++x) {
        const double r = radial[x];
        p.values[x] = r > pot.cutoff ? -pot.coupling / (r * r) : 0.0;
        if (p.values[x] >= 0.0) p.positive[x] = p.values[x];
        else p.negative[x] = -p.values[x];
    }
    SparseTable t = add_diagonal(laplacian_table(*space), p.values);
    SelfAdjointOperator op(space, t, p, 0.0, options.limits);
    const double lmin = op.lambda_min();
    if (lmin >= -op.tol_psd()) return op;
    if (!options.allow_shift)
        throw DomainError("schrodinger: operator is not non-negative at this discretization (lambda_1 = " +
                          std::to_string(lmin) + ")");
    const double delta = op.tol_psd() - lmin;
    SparseTable shifted = add_diagonal(t, std::vector<double>(space->size(), delta));
    return SelfAdjointOperator(std::move(space), std::move(shifted), std::move(p), delta, options.limits);
}

double lowest_eigenvalue(const MetricMeasureSpace& space, const SparseTable& table,
                         const OperatorLimits& limits) {
    if (space.size() <= limits.eigen_budget) {
        Eigen::MatrixXd s = symmetrized(space, table);
        Eigen::VectorXd w;
        symmetric_eigen(s, w, true);
        return w(0);
    }
    ReflectionReduction red(space, table);
    // The ground state of an irreducible Z-matrix is positive, hence invariant.
    if (is_z_matrix(table)) {
        Eigen::MatrixXd b = red.block(red.trivial_sector());
        check_budget(static_cast<std::size_t>(b.rows()), limits);
        Eigen::VectorXd w;
        symmetric_eigen(b, w, true);
        return w(0);
    }
    check_budget(red.max_block(), limits);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < red.num_sectors(); ++s) {
        if (red.sector_orbits(s).empty()) continue;
        Eigen::MatrixXd b = red.block(s);
        Eigen::VectorXd w;
        symmetric_eigen(b, w, true);
        best = std::min(best, w(0));
    }
    return best;
}

SubcriticalResult check_subcritical(const SelfAdjointOperator& op, double eps) {
    if (!op.potential()) throw ConfigError("check_subcritical: operator has no potential");
    if (!(eps >= 0.0 && eps < 1.0)) throw ConfigError("check_subcritical: eps must lie in [0, 1)");
    std::vector<double> add(op.size());
    for (std::size_t x = 0; x < op.size(); ++x) add[x] = -eps * op.potential()->negative[x];
    const SparseTable t = add_diagonal(op.table(), add);
    SubcriticalResult r;
    r.min_eig = lowest_eigenvalue(op.space(), t, op.limits());
    r.pass = r.min_eig >= -op.tol_psd();
    return r;
}

ResonanceResult resonance_proxy(const SelfAdjointOperator& op, const ResonanceOptions& options) {
    if (!op.potential()) throw ConfigError("resonance_proxy: operator has no potential");
    const auto& space = op.space();
    auto positive = [](Eigen::VectorXd g, const char* what) {
        if (g.sum() < 0.0) g = -g;
        const double scale = g.cwiseAbs().maxCoeff();
        if (g.minCoeff() <= -1e-10 * scale)
            throw NumericalError(std::string("resonance_proxy: ") + what +
                                 " ground state is not sign-definite");
        return g;
    };
    const Eigen::VectorXd g = positive(ground_state(space, op.table(), op.limits()).second, "operator");
    const Eigen::VectorXd g0 =
        positive(ground_state(space, laplacian_table(space), op.limits()).second, "reference");
    const auto radial = space.radial();
    double inradius = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < space.size(); ++x)
        if (space.is_boundary_point(x)) inradius = std::min(inradius, radial[x]);
    if (!std::isfinite(inradius)) inradius = *std::max_element(radial.begin(), radial.end());
    const double r_max = options.inner_fraction * inradius;
    const double cutoff = op.potential()->spec.cutoff;

    ResonanceResult res;
    res.eta.resize(space.size());
    std::vector<double> xs, ys;
    for (std::size_t x = 0; x < space.size(); ++x) {
        if (!(g0(static_cast<Eigen::Index>(x)) > 0.0))
            throw NumericalError("resonance_proxy: reference ground state vanishes");
        res.eta[x] = g(static_cast<Eigen::Index>(x)) / g0(static_cast<Eigen::Index>(x));
        if (radial[x] > cutoff && radial[x] <= r_max) {
            xs.push_back(1.0 + radial[x]);
            ys.push_back(res.eta[x]);
        }
    }
    if (xs.empty()) throw ConfigError("resonance_proxy: exterior fit region is empty");
    res.fit = fit_power_law(xs, ys, *std::min_element(xs.begin(), xs.end()),
                            *std::max_element(xs.begin(), xs.end()));
    res.alpha_fit = -res.fit.slope;
    return res;
}

// ---------------------------------------------------------------- reduction

ReflectionReduction::ReflectionReduction(const MetricMeasureSpace& space, const SparseTable& table)
    : space_(&space), table_(&table) {
    const std::size_t n = space.size();
    if (!space.lattice())
        throw BudgetError("operator exceeds the eigen budget and its space has no lattice symmetry");
    const auto& lat = *space.lattice();
    // Axis reflections that leave mu and the table invariant.
    std::vector<std::vector<std::size_t>> gens;
    std::vector<std::size_t> stride(lat.dim(), 1);
    for (std::size_t d = 1; d < lat.dim(); ++d) stride[d] = stride[d - 1] * static_cast<std::size_t>(lat.sides[d - 1]);
    for (std::size_t d = 0; d < lat.dim() && gens.size() < 5; ++d) {
        std::vector<std::size_t> perm(n);
        for (std::size_t x = 0; x < n; ++x) {
            const int c = lat.coord(x)[d];
            perm[x] = x - static_cast<std::size_t>(c) * stride[d] +
                      static_cast<std::size_t>(lat.sides[d] - 1 - c) * stride[d];
        }
        bool ok = true;
        for (std::size_t x = 0; x < n && ok; ++x) {
            if (space.mu(perm[x]) != space.mu(x)) ok = false;
            for (SparseTable::InnerIterator it(table, static_cast<Eigen::Index>(x)); it && ok; ++it)
                if (table.coeff(static_cast<Eigen::Index>(perm[x]),
                                static_cast<Eigen::Index>(perm[static_cast<std::size_t>(it.col())])) != it.value())
                    ok = false;
        }
        if (ok) gens.push_back(std::move(perm));
    }
    if (gens.empty()) throw BudgetError("operator exceeds the eigen budget and has no reflection symmetry");
    generators_ = gens.size();
    const unsigned group = 1u << generators_;

    auto act = [&](unsigned g, std::size_t x) {
        for (std::size_t k = 0; k < generators_; ++k)
            if (g & (1u << k)) x = gens[k][x];
        return x;
    };
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    point_orbit_.assign(n, npos);
    point_element_.assign(n, 0);
    for (std::size_t x = 0; x < n; ++x) {
        if (point_orbit_[x] != npos) continue;
        const std::size_t o = orbit_rep_.size();
        orbit_rep_.push_back(x);
        std::size_t count = 0;
        unsigned stab = 0;
        for (unsigned g = 0; g < group; ++g) {
            const std::size_t y = act(g, x);
            if (y == x) stab |= 1u << g;
            if (point_orbit_[y] == npos) {
                point_orbit_[y] = o;
                point_element_[y] = g;
                ++count;
            }
        }
        orbit_size_.push_back(count);
        orbit_stabilizer_mask_.push_back(stab);
    }
    for (unsigned c = 0; c < group; ++c) {
        Sector s;
        s.character = c;
        s.position.assign(orbit_rep_.size(), npos);
        for (std::size_t o = 0; o < orbit_rep_.size(); ++o) {
            bool fixed = true;
            for (unsigned g = 0; g < group && fixed; ++g)
                if ((orbit_stabilizer_mask_[o] >> g & 1u) && (std::popcount(c & g) & 1)) fixed = false;
            if (fixed) {
                s.position[o] = s.orbits.size();
                s.orbits.push_back(o);
            }
        }
        sectors_.push_back(std::move(s));
    }
}

std::size_t ReflectionReduction::max_block() const {
    std::size_t m = 0;
    for (const auto& s : sectors_) m = std::max(m, s.orbits.size());
    return m;
}

double ReflectionReduction::basis_value(const Sector& s, std::size_t p) const {
    const std::size_t o = point_orbit_[p];
    const double sign = (std::popcount(s.character & point_element_[p]) & 1) ? -1.0 : 1.0;
    return sign / std::sqrt(static_cast<double>(orbit_size_[o]) * space_->mu(p));
}

Eigen::MatrixXd ReflectionReduction::block(std::size_t sector) const {
    const Sector& s = sectors_.at(sector);
    const auto m = static_cast<Eigen::Index>(s.orbits.size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    // B(a, b) = sum_{p, q} basis_a(q) mu(q) A_qp basis_b(p), and
    // mu(q) A_qp = mu(p) A_pq by self-adjointness.
    for (std::size_t p = 0; p < space_->size(); ++p) {
        const std::size_t col = s.position[point_orbit_[p]];
        if (col == npos) continue;
        const double bp = basis_value(s, p) * space_->mu(p);
        for (SparseTable::InnerIterator it(*table_, static_cast<Eigen::Index>(p)); it; ++it) {
            const auto q = static_cast<std::size_t>(it.col());
            const std::size_t row = s.position[point_orbit_[q]];
            if (row == npos) continue;
            b(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += basis_value(s, q) * it.value() * bp;
        }
    }
    return 0.5 * (b + b.transpose());
}

Eigen::VectorXd ReflectionReduction::lift(std::size_t sector, const Eigen::VectorXd& coeffs) const {
    const Sector& s = sectors_.at(sector);
    if (coeffs.size() != static_cast<Eigen::Index>(s.orbits.size()))
        throw ConfigError("lift: coefficient count does not match the sector");
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space_->size()));
    for (std::size_t p = 0; p < space_->size(); ++p) {
        const std::size_t pos = s.position[point_orbit_[p]];
        if (pos != npos) f(static_cast<Eigen::Index>(p)) = coeffs(static_cast<Eigen::Index>(pos)) * basis_value(s, p);
    }
    return f;
}

// ---------------------------------------------------------------- cache io

namespace {
constexpr char kTag[6] = {'S', 'M', 'L', 'A', 'B', '1'};
static_assert(std::endian::native == std::endian::little, "cache format is little-endian");
}  // namespace

void save_eigensystem(const std::string& path, const SelfAdjointOperator& op) {
    const Eigensystem& es = op.eigensystem();
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write eigensystem cache '" + path + "'");
        const std::uint64_t header[3] = {static_cast<std::uint64_t>(op.size()), op.space().content_hash(),
                                         op.content_hash()};
        out.write(kTag, sizeof kTag);
        out.write(reinterpret_cast<const char*>(header), sizeof header);
        out.write(reinterpret_cast<const char*>(es.values.data()),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(es.values.size())));
        out.write(reinterpret_cast<const char*>(es.vectors.data()),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(es.vectors.size())));
        if (!out) throw IoError("failed writing eigensystem cache '" + path + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename '" + tmp + "'");
}

bool load_eigensystem(const std::string& path, const SelfAdjointOperator& op) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char tag[6];
    std::uint64_t header[3];
    in.read(tag, sizeof tag);
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (!in || std::memcmp(tag, kTag, sizeof tag) != 0) throw IoError("'" + path + "' is not an SMLAB1 cache");
    if (header[0] != op.size() || header[1] != op.space().content_hash() || header[2] != op.content_hash())
        return false;
    const auto n = static_cast<Eigen::Index>(header[0]);
    Eigensystem es{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
    in.read(reinterpret_cast<char*>(es.values.data()), static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(n)));
    in.read(reinterpret_cast<char*>(es.vectors.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(n * n)));
    if (!in) throw IoError("'" + path + "' is truncated");
    op.adopt_eigensystem(std::move(es));
    return true;
}

}  // namespace smlab
