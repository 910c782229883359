#include "smlab/metric_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <queue>
#include <sstream>
#include <utility>

#include "smlab/error.hpp"
#include "smlab/fit.hpp"

namespace smlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Fnv1a {
public:
    void add(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (v >> (8 * i)) & 0xffu;
            h_ *= 0x100000001b3ull;
        }
    }
    void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ull;
};

// Closed-ball membership with a relative guard against rounding in path sums.
inline bool within(double d, double r) { return d <= r + 1e-12 * std::max(1.0, r); }

}  // namespace

struct MetricMeasureSpace::Cache {
    std::once_flag dist_once;
    std::vector<double> dist;
    std::once_flag radial_once;
    std::vector<double> radial;
};

MetricMeasureSpace::MetricMeasureSpace(std::vector<double> mu, std::vector<Edge> edges,
                                       std::vector<std::size_t> compact,
                                       std::vector<double> killing,
                                       std::optional<LatticeInfo> lattice,
                                       std::vector<std::uint8_t> part, SpaceLimits limits)
    : mu_(std::move(mu)),
      edges_(std::move(edges)),
      compact_(std::move(compact)),
      killing_(std::move(killing)),
      part_(std::move(part)),
      lattice_(std::move(lattice)),
      limits_(limits),
      cache_(std::make_unique<Cache>()) {
    const std::size_t n = mu_.size();
    if (n == 0) throw ConfigError("space has no points");
    if (n > limits_.point_budget)
        throw BudgetError("space has " + std::to_string(n) + " points, exceeding budget " +
                          std::to_string(limits_.point_budget));
    for (std::size_t x = 0; x < n; ++x)
        if (!(mu_[x] > 0.0) || !std::isfinite(mu_[x]))
            throw ConfigError("mu must be positive at point " + std::to_string(x));
    if (killing_.empty()) killing_.assign(n, 0.0);
    if (killing_.size() != n) throw ConfigError("killing weights do not match point count");
    for (double k : killing_)
        if (!(k >= 0.0)) throw ConfigError("killing weights must be nonnegative");
    if (part_.empty()) part_.assign(n, 0);
    if (part_.size() != n) throw ConfigError("part labels do not match point count");
    for (std::size_t z : compact_)
        if (z >= n) throw ConfigError("compact set references point " + std::to_string(z));
    std::sort(compact_.begin(), compact_.end());
    compact_.erase(std::unique(compact_.begin(), compact_.end()), compact_.end());

    std::vector<std::pair<std::size_t, std::size_t>> keys;
    keys.reserve(edges_.size());
    min_length_ = kInf;
    for (const Edge& e : edges_) {
        if (e.a >= n || e.b >= n)
            throw ConfigError("edge references nonexistent point " +
                              std::to_string(std::max(e.a, e.b)));
        if (e.a == e.b) throw ConfigError("self loop at point " + std::to_string(e.a));
        if (!(e.conductance > 0.0) || !std::isfinite(e.conductance))
            throw ConfigError("edge conductance must be positive");
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            throw ConfigError("edge length must be positive");
        keys.emplace_back(std::min(e.a, e.b), std::max(e.a, e.b));
        min_length_ = std::min(min_length_, e.length);
        if (e.length != edges_.front().length) uniform_length_ = false;
    }
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
        throw ConfigError("duplicate edge in edge list");
    if (edges_.empty()) min_length_ = 0.0;

    offsets_.assign(n + 1, 0);
    for (const Edge& e : edges_) {
        ++offsets_[e.a + 1];
        ++offsets_[e.b + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adj_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges_) {
        adj_[fill[e.a]++] = {e.b, e.conductance, e.length};
        adj_[fill[e.b]++] = {e.a, e.conductance, e.length};
    }
    for (std::size_t x = 0; x < n; ++x)
        std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[x]),
                  adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[x + 1]),
                  [](const Neighbor& l, const Neighbor& r) { return l.y < r.y; });

    std::vector<char> seen(n, 0);
    std::deque<std::size_t> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const std::size_t x = queue.front();
        queue.pop_front();
        for (const Neighbor& nb : neighbors(x))
            if (!seen[nb.y]) {
                seen[nb.y] = 1;
                ++reached;
                queue.push_back(nb.y);
            }
    }
    if (reached != n) throw ConfigError("space is not connected");

    total_mass_ = std::accumulate(mu_.begin(), mu_.end(), 0.0);

    Fnv1a h;
    h.add(static_cast<std::uint64_t>(n));
    for (double v : mu_) h.add(v);
    for (double v : killing_) h.add(v);
    h.add(static_cast<std::uint64_t>(edges_.size()));
    for (const Edge& e : edges_) {
        h.add(static_cast<std::uint64_t>(e.a));
        h.add(static_cast<std::uint64_t>(e.b));
        h.add(e.conductance);
        h.add(e.length);
    }
    for (std::size_t z : compact_) h.add(static_cast<std::uint64_t>(z));
    hash_ = h.value();
}

MetricMeasureSpace::MetricMeasureSpace(MetricMeasureSpace&&) noexcept = default;
MetricMeasureSpace& MetricMeasureSpace::operator=(MetricMeasureSpace&&) noexcept = default;
MetricMeasureSpace::~MetricMeasureSpace() = default;

bool MetricMeasureSpace::is_boundary_point(std::size_t x) const {
    if (lattice_) {
        const auto c = lattice_->coord(x);
        for (std::size_t d = 0; d < lattice_->dim(); ++d)
            if (!lattice_->periodic[d] && (c[d] == 0 || c[d] == lattice_->sides[d] - 1)) return true;
        return false;
    }
    std::size_t max_degree = 0;
    for (std::size_t y = 0; y < size(); ++y)
        max_degree = std::max(max_degree, offsets_[y + 1] - offsets_[y]);
    return offsets_[x + 1] - offsets_[x] < max_degree;
}

std::vector<double> MetricMeasureSpace::distances_from(std::size_t x) const {
    const std::size_t n = size();
    std::vector<double> d(n, kInf);
    d[x] = 0.0;
    if (uniform_length_) {
        const double len = edges_.empty() ? 0.0 : edges_.front().length;
        std::vector<std::uint32_t> hops(n, UINT32_MAX);
        std::vector<std::size_t> queue;
        queue.reserve(n);
        queue.push_back(x);
        hops[x] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t u = queue[head];
            for (const Neighbor& nb : neighbors(u))
                if (hops[nb.y] == UINT32_MAX) {
                    hops[nb.y] = hops[u] + 1;
                    queue.push_back(nb.y);
                }
        }
        for (std::size_t y = 0; y < n; ++y) d[y] = hops[y] * len;
        return d;
    }
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, x);
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (du > d[u]) continue;
        for (const Neighbor& nb : neighbors(u)) {
            const double cand = du + nb.length;
            if (cand < d[nb.y]) {
                d[nb.y] = cand;
                heap.emplace(cand, nb.y);
            }
        }
    }
    return d;
}

std::span<const double> MetricMeasureSpace::distance_table() const {
    if (!has_distance_table_budget())
        throw BudgetError("all-pairs distance table for " + std::to_string(size()) +
                          " points exceeds budget " +
                          std::to_string(limits_.distance_table_budget));
    std::call_once(cache_->dist_once, [this] {
        const std::size_t n = size();
        std::vector<double> table(n * n);
        for (std::size_t x = 0; x < n; ++x) {
            const auto row = distances_from(x);
            std::copy(row.begin(), row.end(), table.begin() + static_cast<std::ptrdiff_t>(x * n));
        }
        cache_->dist = std::move(table);
    });
    return cache_->dist;
}

double MetricMeasureSpace::distance(std::size_t x, std::size_t y) const {
    if (has_distance_table_budget()) return distance_table()[x * size() + y];
    return distances_from(x)[y];
}

double MetricMeasureSpace::diameter() const {
    if (has_distance_table_budget()) {
        const auto t = distance_table();
        return *std::max_element(t.begin(), t.end());
    }
    double best = 0.0;
    for (std::size_t x = 0; x < size(); ++x) {
        const auto row = distances_from(x);
        best = std::max(best, *std::max_element(row.begin(), row.end()));
    }
    return best;
}

std::span<const double> MetricMeasureSpace::radial() const {
    if (compact_.empty()) throw ConfigError("radial coordinate needs a nonempty compact set K");
    std::call_once(cache_->radial_once, [this] {
        std::vector<double> r(size(), 0.0);
        for (std::size_t z : compact_) {
            const auto row = has_distance_table_budget()
                                 ? std::vector<double>(distance_table().begin() +
                                                           static_cast<std::ptrdiff_t>(z * size()),
                                                       distance_table().begin() +
                                                           static_cast<std::ptrdiff_t>((z + 1) * size()))
                                 : distances_from(z);
            for (std::size_t x = 0; x < size(); ++x) r[x] = std::max(r[x], row[x]);
        }
        cache_->radial = std::move(r);
    });
    return cache_->radial;
}

MetricMeasureSpace build_lattice(const std::vector<int>& sides, const std::vector<bool>& periodic,
                                 double h, Boundary boundary, const SpaceLimits& limits) {
    const std::size_t m = sides.size();
    if (m == 0) throw ConfigError("lattice needs at least one axis");
    if (periodic.size() != m) throw ConfigError("periodic flags do not match lattice axes");
    if (!(h > 0.0)) throw ConfigError("spacing h must be positive");
    double count = 1.0;
    for (std::size_t d = 0; d < m; ++d) {
        if (sides[d] < 2) throw ConfigError("lattice side must be at least 2");
        if (periodic[d] && sides[d] < 3) throw ConfigError("periodic side must be at least 3");
        count *= sides[d];
    }
    if (count > static_cast<double>(limits.point_budget))
        throw BudgetError("lattice has " + std::to_string(static_cast<long long>(count)) +
                          " points, exceeding budget " + std::to_string(limits.point_budget));
    const auto n = static_cast<std::size_t>(count);
    const double w = std::pow(h, static_cast<double>(m) - 2.0);
    const double mu = std::pow(h, static_cast<double>(m));

    std::vector<std::size_t> stride(m, 1);
    for (std::size_t d = 1; d < m; ++d) stride[d] = stride[d - 1] * static_cast<std::size_t>(sides[d - 1]);

    LatticeInfo info{sides, periodic, h, boundary, std::vector<int>(n * m)};
    std::vector<Edge> edges;
    std::vector<double> killing(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        std::size_t rest = x;
        for (std::size_t d = 0; d < m; ++d) {
            info.coords[x * m + d] = static_cast<int>(rest % static_cast<std::size_t>(sides[d]));
            rest /= static_cast<std::size_t>(sides[d]);
        }
        for (std::size_t d = 0; d < m; ++d) {
            const int c = info.coords[x * m + d];
            if (c + 1 < sides[d]) {
                edges.push_back({x, x + stride[d], w, h});
            } else if (periodic[d]) {
                edges.push_back({x, x - static_cast<std::size_t>(c) * stride[d], w, h});
            }
            if (!periodic[d] && boundary == Boundary::absorbing) {
                if (c == 0) killing[x] += w;
                if (c == sides[d] - 1) killing[x] += w;
            }
        }
    }
    std::size_t center = 0;
    for (std::size_t d = 0; d < m; ++d) center += static_cast<std::size_t>((sides[d] - 1) / 2) * stride[d];
    return MetricMeasureSpace(std::vector<double>(n, mu), std::move(edges), {center},
                              std::move(killing), std::move(info), {}, limits);
}

MetricMeasureSpace build_grid(int dim, int side, double h, Boundary boundary,
                              const SpaceLimits& limits) {
    if (dim < 1) throw ConfigError("grid dimension must be at least 1");
    return build_lattice(std::vector<int>(static_cast<std::size_t>(dim), side),
                         std::vector<bool>(static_cast<std::size_t>(dim), false), h, boundary,
                         limits);
}

MetricMeasureSpace build_torus(int dim, int side, double h, const SpaceLimits& limits) {
    if (dim < 1) throw ConfigError("torus dimension must be at least 1");
    if (side < 3) throw ConfigError("torus side must be at least 3");
    return build_lattice(std::vector<int>(static_cast<std::size_t>(dim), side),
                         std::vector<bool>(static_cast<std::size_t>(dim), true), h,
                         Boundary::free, limits);
}

MetricMeasureSpace connected_sum(const MetricMeasureSpace& a, const MetricMeasureSpace& b,
                                 const std::vector<std::size_t>& face_a,
                                 const std::vector<std::size_t>& face_b) {
    if (face_a.size() != face_b.size())
        throw ConfigError("connected_sum: faces have different sizes (" +
                          std::to_string(face_a.size()) + " vs " + std::to_string(face_b.size()) +
                          ")");
    if (face_a.empty()) throw ConfigError("connected_sum: empty face");
    const std::size_t na = a.size(), nb = b.size();
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> glued_to(nb, kNone);
    std::vector<char> in_face_a(na, 0);
    for (std::size_t i = 0; i < face_a.size(); ++i) {
        if (face_a[i] >= na || face_b[i] >= nb)
            throw ConfigError("connected_sum: face references nonexistent point");
        if (in_face_a[face_a[i]] || glued_to[face_b[i]] != kNone)
            throw ConfigError("connected_sum: repeated face point");
        if (!a.is_boundary_point(face_a[i]) || !b.is_boundary_point(face_b[i]))
            throw ConfigError("connected_sum: face point is not a boundary point");
        in_face_a[face_a[i]] = 1;
        glued_to[face_b[i]] = face_a[i];
    }
    std::vector<std::size_t> map_b(nb);
    std::size_t next = na;
    for (std::size_t y = 0; y < nb; ++y) map_b[y] = glued_to[y] != kNone ? glued_to[y] : next++;
    const std::size_t n = next;

    std::vector<double> mu(a.mu().begin(), a.mu().end());
    mu.resize(n);
    std::vector<double> killing(a.killing().begin(), a.killing().end());
    killing.resize(n, 0.0);
    std::vector<std::uint8_t> part(n, 1);
    std::fill(part.begin(), part.begin() + static_cast<std::ptrdiff_t>(na), 0);
    for (std::size_t y = 0; y < nb; ++y) {
        const std::size_t x = map_b[y];
        if (glued_to[y] != kNone) {
            mu[x] = 0.5 * (mu[x] + b.mu(y));
            killing[x] = 0.5 * (killing[x] + b.killing()[y]);
            part[x] = 2;
        } else {
            mu[x] = b.mu(y);
            killing[x] = b.killing()[y];
        }
    }

    // Edges present in both pieces after identification are merged:
    // conductance averaged, length the shorter of the two.
    std::map<std::pair<std::size_t, std::size_t>, std::pair<Edge, int>> merged;
    auto add = [&](std::size_t x, std::size_t y, double w, double len) {
        auto key = std::make_pair(std::min(x, y), std::max(x, y));
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(key, std::make_pair(Edge{key.first, key.second, w, len}, 1));
        } else {
            it->second.first.conductance += w;
            it->second.first.length = std::min(it->second.first.length, len);
            ++it->second.second;
        }
    };
    for (const Edge& e : a.edges()) add(e.a, e.b, e.conductance, e.length);
    for (const Edge& e : b.edges()) add(map_b[e.a], map_b[e.b], e.conductance, e.length);
    std::vector<Edge> edges;
    edges.reserve(merged.size());
    for (auto& [key, val] : merged) {
        Edge e = val.first;
        e.conductance /= val.second;
        edges.push_back(e);
    }
    std::vector<std::size_t> compact(face_a.begin(), face_a.end());
    SpaceLimits limits = a.limits();
    return MetricMeasureSpace(std::move(mu), std::move(edges), std::move(compact),
                              std::move(killing), std::nullopt, std::move(part), limits);
}

MetricMeasureSpace build_ends_model(const EndsModelParams& p, const SpaceLimits& limits) {
    if (p.n <= 2) throw ConfigError("ends model needs n > 2");
    if (p.n > p.m) throw ConfigError("ends model needs n <= m");
    if (p.side_small < 2 || p.side_big < 2) throw ConfigError("ends model sides must be at least 2");
    const int k = p.m - p.n;
    if (k > 0 && p.torus_side < 3) throw ConfigError("torus_side must be at least 3");
    double count = std::pow(p.side_small, p.n) * std::pow(p.torus_side, k) + std::pow(p.side_big, p.m);
    if (count > static_cast<double>(limits.point_budget))
        throw BudgetError("ends model would have about " +
                          std::to_string(static_cast<long long>(count)) +
                          " points, exceeding budget " + std::to_string(limits.point_budget));

    std::vector<int> small_sides(static_cast<std::size_t>(p.n), p.side_small);
    std::vector<bool> small_periodic(static_cast<std::size_t>(p.n), false);
    for (int i = 0; i < k; ++i) {
        small_sides.push_back(p.torus_side);
        small_periodic.push_back(true);
    }
    // Both ends use the m-dimensional continuum scaling.
    const MetricMeasureSpace small = build_lattice(small_sides, small_periodic, p.h, Boundary::free, limits);
    const MetricMeasureSpace big =
        build_grid(p.m, p.side_big, p.h, Boundary::free, limits);

    // Common sub-face: first coordinate 0, every other coordinate below the
    // extent both pieces share.
    const auto& ls = *small.lattice();
    const auto& lb = *big.lattice();
    std::vector<std::size_t> face_small, face_big;
    std::vector<std::size_t> stride_big(static_cast<std::size_t>(p.m), 1);
    for (std::size_t d = 1; d < stride_big.size(); ++d) stride_big[d] = stride_big[d - 1] * static_cast<std::size_t>(p.side_big);
    for (std::size_t x = 0; x < small.size(); ++x) {
        const auto c = ls.coord(x);
        if (c[0] != 0) continue;
        bool ok = true;
        std::size_t y = 0;
        for (std::size_t d = 1; d < c.size(); ++d) {
            const int limit = std::min(ls.sides[d], lb.sides[d]);
            if (c[d] >= limit) {
                ok = false;
                break;
            }
            y += static_cast<std::size_t>(c[d]) * stride_big[d];
        }
        if (!ok) continue;
        face_small.push_back(x);
        face_big.push_back(y);
    }
    return connected_sum(small, big, face_small, face_big);
}

MetricMeasureSpace load_custom_space(const std::string& edges_path, const std::string& mu_path,
                                     const std::vector<std::size_t>& compact,
                                     const SpaceLimits& limits) {
    std::ifstream mu_in(mu_path);
    if (!mu_in) throw ConfigError("cannot open mu file '" + mu_path + "'");
    std::vector<double> mu;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(mu_in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        double v;
        if (!(ls >> v)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ConfigError(mu_path + ":" + std::to_string(lineno) + ": expected a number");
        }
        mu.push_back(v);
    }
    std::ifstream e_in(edges_path);
    if (!e_in) throw ConfigError("cannot open edge file '" + edges_path + "'");
    std::vector<Edge> edges;
    lineno = 0;
    while (std::getline(e_in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        long long x, y;
        double w, len;
        if (!(ls >> x >> y >> w >> len) || x < 0 || y < 0)
            throw ConfigError(edges_path + ":" + std::to_string(lineno) +
                              ": expected 'x y conductance length'");
        edges.push_back({static_cast<std::size_t>(x), static_cast<std::size_t>(y), w, len});
    }
    return MetricMeasureSpace(std::move(mu), std::move(edges), compact, {}, std::nullopt, {}, limits);
}

double volume(const MetricMeasureSpace& space, std::size_t x, double r) {
    if (r < 0.0) throw ConfigError("volume: radius must be nonnegative");
    const std::size_t n = space.size();
    double v = 0.0;
    if (space.has_distance_table_budget()) {
        const auto row = space.distance_table().subspan(x * n, n);
        for (std::size_t y = 0; y < n; ++y)
            if (within(row[y], r)) v += space.mu(y);
    } else {
        const auto row = space.distances_from(x);
        for (std::size_t y = 0; y < n; ++y)
            if (within(row[y], r)) v += space.mu(y);
    }
    return v;
}

std::vector<double> volumes(const MetricMeasureSpace& space, double r) {
    const std::size_t n = space.size();
    std::vector<double> v(n, 0.0);
    const auto table = space.distance_table();
    for (std::size_t x = 0; x < n; ++x) {
        const double* row = table.data() + x * n;
        double s = 0.0;
        for (std::size_t y = 0; y < n; ++y)
            if (within(row[y], r)) s += space.mu(y);
        v[x] = s;
    }
    return v;
}

double doubling_ratio(const MetricMeasureSpace& space, const std::vector<double>& radii,
                      const std::vector<std::size_t>& centers) {
    if (radii.empty()) throw ConfigError("doubling_ratio: empty radius list");
    std::vector<std::size_t> pts = centers;
    if (pts.empty()) {
        pts.resize(space.size());
        std::iota(pts.begin(), pts.end(), std::size_t{0});
    }
    double best = 1.0;
    for (std::size_t x : pts) {
        if (x >= space.size()) throw ConfigError("doubling_ratio: center out of range");
        for (double r : radii)
            best = std::max(best, volume(space, x, 2.0 * r) / volume(space, x, r));
    }
    return best;
}

double radial_coordinate(const MetricMeasureSpace& space, std::size_t x) {
    return space.radial()[x];
}

std::vector<VolumeRow> sup_volume_table(const MetricMeasureSpace& space,
                                        const std::vector<double>& radii,
                                        const std::vector<std::size_t>& centers) {
    std::vector<std::size_t> pts = centers;
    if (pts.empty()) {
        pts.resize(space.size());
        std::iota(pts.begin(), pts.end(), std::size_t{0});
    }
    std::vector<VolumeRow> rows;
    for (double r : radii) {
        VolumeRow row{r, -1.0, 0};
        for (std::size_t x : pts) {
            const double v = volume(space, x, r);
            if (v > row.sup_volume) {
                row.sup_volume = v;
                row.argmax = x;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

VolumeProfile volume_profile_fit(const MetricMeasureSpace& space, const std::vector<double>& r_grid,
                                 double crossover, const std::vector<std::size_t>& centers) {
    std::vector<double> below, above;
    for (double r : r_grid) (r <= crossover ? below : above).push_back(r);
    if (below.size() < 3 || above.size() < 3)
        throw ConfigError("volume_profile_fit: need at least 3 radii on each side of the crossover");
    const double offset = 0.5 * space.min_length();
    auto fit = [&](const std::vector<double>& radii) {
        const auto rows = sup_volume_table(space, radii, centers);
        std::vector<double> x, y;
        for (const auto& row : rows) {
            x.push_back(row.r + offset);
            y.push_back(row.sup_volume);
        }
        return fit_power_law(x, y, x.front(), x.back());
    };
    std::sort(below.begin(), below.end());
    std::sort(above.begin(), above.end());
    const ExponentFit lo = fit(below);
    const ExponentFit hi = fit(above);
    return {lo.slope, hi.slope, crossover, std::max(lo.residual_rms, hi.residual_rms)};
}

}  // namespace smlab
