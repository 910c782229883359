#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smlab/fit.hpp"
#include "smlab/metric_space.hpp"

namespace smlab {

using SparseTable = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct PotentialSpec {
    double coupling = 0.0;  // c in V(x) = -c / |x|^2
    double cutoff = 1.0;    // V = 0 for |x| <= cutoff
};

struct Potential {
    PotentialSpec spec;
    std::vector<double> values;    // V
    std::vector<double> positive;  // V+
    std::vector<double> negative;  // V-, so V = V+ - V-
};

struct OperatorLimits {
    std::size_t eigen_budget = 6000;
};

// Eigenpairs with columns orthonormal in the mu inner product.
struct Eigensystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

// What diagonal spectral sums d(x) = sum_i w(lambda_i) u_i(x)^2 need. Points
// are grouped into classes on which every u_i(x)^2 sum is constant; each
// block stores its eigenvalues and, per class row, the summed squares that a
// single point of the class receives.
struct DiagonalSpectrum {
    struct Block {
        Eigen::VectorXd values;
        Eigen::MatrixXd squared;  // classes.size() x values.size()
        std::vector<std::size_t> classes;
    };
    std::vector<std::size_t> point_class;
    std::size_t num_classes = 0;
    std::vector<Block> blocks;

    double min_eigenvalue() const;
    double max_eigenvalue() const;
    std::size_t num_eigenvalues() const;
    std::vector<double> diagonal(const std::function<double(double)>& w) const;
};

class SelfAdjointOperator {
public:
    SelfAdjointOperator(SpacePtr space, SparseTable table, std::optional<Potential> potential = {},
                        double shift = 0.0, OperatorLimits limits = {});
    SelfAdjointOperator(SelfAdjointOperator&&) noexcept;
    SelfAdjointOperator& operator=(SelfAdjointOperator&&) noexcept;
    ~SelfAdjointOperator();

    const MetricMeasureSpace& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }
    std::size_t size() const { return space_->size(); }
    const SparseTable& table() const { return table_; }
    Eigen::MatrixXd dense_table() const;
    const std::optional<Potential>& potential() const { return potential_; }
    double shift() const { return shift_; }
    const OperatorLimits& limits() const { return limits_; }

    void apply(std::span<const double> f, std::span<double> out) const;

    // Dense eigendecomposition; computed once. BudgetError above the budget.
    const Eigensystem& eigensystem() const;
    bool has_eigensystem() const;
    // Installs a decomposition loaded from a cache file.
    void adopt_eigensystem(Eigensystem es) const;

    // Full eigensystem when within budget, otherwise reflection-reduced blocks.
    const DiagonalSpectrum& diagonal_spectrum() const;

    // Exact spectral extremes within the eigen budget; above it the lowest
    // eigenvalue comes from the symmetric sector and the largest from a
    // Gershgorin bound.
    double lambda_min() const;
    double lambda_max_bound() const;
    double tol_psd() const;

    std::uint64_t content_hash() const { return hash_; }

private:
    struct Cache;
    SpacePtr space_;
    SparseTable table_;
    std::optional<Potential> potential_;
    double shift_ = 0.0;
    OperatorLimits limits_;
    std::uint64_t hash_ = 0;
    std::unique_ptr<Cache> cache_;
};

SelfAdjointOperator laplacian(SpacePtr space, OperatorLimits limits = {});

struct SchrodingerOptions {
    OperatorLimits limits;
    // When set, enforce the admissible range 0 < c <= ((n-2)/2)^2.
    std::optional<int> murata_dim;
    // Shift by delta = tol - lambda_1 instead of failing when L is not >= 0.
    bool allow_shift = false;
};

SelfAdjointOperator schrodinger(SpacePtr space, const PotentialSpec& pot,
                                const SchrodingerOptions& options = {});

// Lowest eigenvalue of a mu-symmetric coefficient table. Reflection-reduced
// to the symmetric sector when the table exceeds the budget.
double lowest_eigenvalue(const MetricMeasureSpace& space, const SparseTable& table,
                         const OperatorLimits& limits);

struct SubcriticalResult {
    double min_eig = 0.0;
    bool pass = false;
};

// Lowest eigenvalue of L - eps * V- (V- >= 0 is the negative part of V).
SubcriticalResult check_subcritical(const SelfAdjointOperator& op, double eps);

struct ResonanceOptions {
    // Fit over cutoff < |x| <= fraction * (smallest |x| on the boundary).
    double inner_fraction = 0.5;
};

struct ResonanceResult {
    std::vector<double> eta;  // positive ground state, divided by the c = 0 ground state
    double alpha_fit = 0.0;   // minus the log-log slope of eta against 1 + |x|
    ExponentFit fit;
};

ResonanceResult resonance_proxy(const SelfAdjointOperator& op, const ResonanceOptions& options = {});

// Z_2^k reflection symmetry of a lattice space, used to split a large
// operator into independent blocks, one per character of the group.
class ReflectionReduction {
public:
    ReflectionReduction(const MetricMeasureSpace& space, const SparseTable& table);

    std::size_t num_sectors() const { return sectors_.size(); }
    std::size_t num_orbits() const { return orbit_rep_.size(); }
    std::span<const std::size_t> point_orbit() const { return point_orbit_; }
    std::span<const std::size_t> sector_orbits(std::size_t s) const { return sectors_[s].orbits; }
    std::size_t orbit_size(std::size_t o) const { return orbit_size_[o]; }
    std::size_t max_block() const;
    // Index of the sector of the trivial character.
    std::size_t trivial_sector() const { return 0; }

    // Matrix of the operator in the mu-orthonormal basis of the sector.
    Eigen::MatrixXd block(std::size_t sector) const;
    // Expands sector coordinates to a function on the points.
    Eigen::VectorXd lift(std::size_t sector, const Eigen::VectorXd& coeffs) const;

private:
    struct Sector {
        unsigned character = 0;
        std::vector<std::size_t> orbits;
        std::vector<std::size_t> position;  // orbit -> row in the block, or npos
    };
    double basis_value(const Sector& s, std::size_t point) const;

    const MetricMeasureSpace* space_;
    const SparseTable* table_;
    std::size_t generators_ = 0;
    std::vector<std::size_t> point_orbit_;
    std::vector<unsigned> point_element_;  // g with g(rep) = point
    std::vector<std::size_t> orbit_rep_;
    std::vector<std::size_t> orbit_size_;
    std::vector<unsigned> orbit_stabilizer_mask_;
    std::vector<Sector> sectors_;
};

// Eigensystem cache: "SMLAB1" tag, N, space hash, operator hash, eigenvalues,
// eigenvectors (column-major), little-endian doubles.
void save_eigensystem(const std::string& path, const SelfAdjointOperator& op);
// Returns false when the file is absent or belongs to another space/operator.
bool load_eigensystem(const std::string& path, const SelfAdjointOperator& op);

}  // namespace smlab
