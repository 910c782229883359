#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smlab {

struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    double conductance = 1.0;
    double length = 1.0;
};

enum class Boundary { absorbing, free };

// Present on spaces built directly from a lattice.
struct LatticeInfo {
    std::vector<int> sides;
    std::vector<bool> periodic;
    double spacing = 1.0;
    Boundary boundary = Boundary::free;
    std::vector<int> coords;  // row-major, size() * dim()

    std::size_t dim() const { return sides.size(); }
    std::span<const int> coord(std::size_t x) const {
        return {coords.data() + x * dim(), dim()};
    }
};

struct SpaceLimits {
    std::size_t point_budget = 20000;
    // All-pairs distance tables above this size are refused.
    std::size_t distance_table_budget = 8000;
};

class MetricMeasureSpace {
public:
    struct Neighbor {
        std::size_t y;
        double conductance;
        double length;
    };

    // Validates positivity, index ranges, absence of self loops and duplicate
    // edges, and connectivity. `killing` is an optional per-point nonnegative
    // weight left by deleted boundary edges; `part` tags points by origin.
    MetricMeasureSpace(std::vector<double> mu, std::vector<Edge> edges,
                       std::vector<std::size_t> compact = {}, std::vector<double> killing = {},
                       std::optional<LatticeInfo> lattice = std::nullopt,
                       std::vector<std::uint8_t> part = {}, SpaceLimits limits = {});
    MetricMeasureSpace(MetricMeasureSpace&&) noexcept;
    MetricMeasureSpace& operator=(MetricMeasureSpace&&) noexcept;
    ~MetricMeasureSpace();

    std::size_t size() const { return mu_.size(); }
    double mu(std::size_t x) const { return mu_[x]; }
    std::span<const double> mu() const { return mu_; }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const double> killing() const { return killing_; }
    std::span<const std::size_t> compact() const { return compact_; }
    std::span<const std::uint8_t> part() const { return part_; }
    std::span<const Neighbor> neighbors(std::size_t x) const {
        return {adj_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
    }
    const std::optional<LatticeInfo>& lattice() const { return lattice_; }
    const SpaceLimits& limits() const { return limits_; }

    double total_mass() const { return total_mass_; }
    double min_length() const { return min_length_; }
    bool is_boundary_point(std::size_t x) const;

    // Single-source shortest paths (BFS when all lengths agree, else Dijkstra).
    std::vector<double> distances_from(std::size_t x) const;
    // All-pairs table, row x at offset x*N. Filled once, thread-safe.
    std::span<const double> distance_table() const;
    bool has_distance_table_budget() const { return size() <= limits_.distance_table_budget; }
    double distance(std::size_t x, std::size_t y) const;
    double diameter() const;
    // |x| = sup over z in K of d(x, z), for all x. Cached.
    std::span<const double> radial() const;

    std::uint64_t content_hash() const { return hash_; }

private:
    struct Cache;
    std::vector<double> mu_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> compact_;
    std::vector<double> killing_;
    std::vector<std::uint8_t> part_;
    std::optional<LatticeInfo> lattice_;
    SpaceLimits limits_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adj_;
    double total_mass_ = 0.0;
    double min_length_ = 0.0;
    bool uniform_length_ = true;
    std::uint64_t hash_ = 0;
    std::unique_ptr<Cache> cache_;
};

using SpacePtr = std::shared_ptr<const MetricMeasureSpace>;

// Cubic lattice with conductance h^(m-2) and mu = h^m, where m is the
// number of lattice axes. Non-periodic axes with absorbing boundary record
// the conductance of each missing neighbor as killing weight.
MetricMeasureSpace build_lattice(const std::vector<int>& sides, const std::vector<bool>& periodic,
                                 double h, Boundary boundary, const SpaceLimits& limits = {});
MetricMeasureSpace build_grid(int dim, int side, double h, Boundary boundary,
                              const SpaceLimits& limits = {});
MetricMeasureSpace build_torus(int dim, int side, double h, const SpaceLimits& limits = {});

// Identifies face_a[i] with face_b[i]. Points of `a` keep their indices; the
// remaining points of `b` follow in order. part(): 0 from a, 1 from b, 2 glued.
MetricMeasureSpace connected_sum(const MetricMeasureSpace& a, const MetricMeasureSpace& b,
                                 const std::vector<std::size_t>& face_a,
                                 const std::vector<std::size_t>& face_b);

struct EndsModelParams {
    int n = 3;
    int m = 4;
    int side_small = 10;
    int side_big = 6;
    int torus_side = 4;
    double h = 1.0;
};

// Small end: n-dim half grid times an (m-n)-dim torus. Big end: m-dim grid.
// Glued along the common sub-face where the first coordinate vanishes.
// part(): 0 small end, 1 big end, 2 gluing set (which is K).
MetricMeasureSpace build_ends_model(const EndsModelParams& p, const SpaceLimits& limits = {});

// Edge list lines "x y conductance length" and one mu value per line.
MetricMeasureSpace load_custom_space(const std::string& edges_path, const std::string& mu_path,
                                     const std::vector<std::size_t>& compact = {},
                                     const SpaceLimits& limits = {});

// Closed ball volume mu(B(x, r)).
double volume(const MetricMeasureSpace& space, std::size_t x, double r);
// V(x, r) for every x at once (uses the distance table).
std::vector<double> volumes(const MetricMeasureSpace& space, double r);

// max over centers and radii of V(x, 2r) / V(x, r). All points when centers is empty.
double doubling_ratio(const MetricMeasureSpace& space, const std::vector<double>& radii,
                      const std::vector<std::size_t>& centers = {});

double radial_coordinate(const MetricMeasureSpace& space, std::size_t x);

struct VolumeProfile {
    double n_small = 0.0;
    double n_large = 0.0;
    double crossover_radius = 0.0;
    double fit_residual = 0.0;
};

struct VolumeRow {
    double r;
    double sup_volume;
    std::size_t argmax;
};

std::vector<VolumeRow> sup_volume_table(const MetricMeasureSpace& space,
                                        const std::vector<double>& radii,
                                        const std::vector<std::size_t>& centers = {});

// Log-log slope of sup_x V(x, r) against r + h/2 (h the shortest edge), the
// cell-centred radius of a lattice ball, on either side of `crossover`.
VolumeProfile volume_profile_fit(const MetricMeasureSpace& space, const std::vector<double>& r_grid,
                                 double crossover, const std::vector<std::size_t>& centers = {});

}  // namespace smlab
