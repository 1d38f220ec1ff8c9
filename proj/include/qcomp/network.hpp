#pragma once

// One realization of a secure sensor network: key rings drawn from the pool,
// positions on the unit torus, and the secure topology, which is the
// intersection of the key graph (at least q shared keys) and the geometric
// graph (torus distance at most r).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "qcomp/errors.hpp"
#include "qcomp/exact.hpp"
#include "qcomp/rng.hpp"

namespace qcomp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

using Edge = std::pair<std::uint32_t, std::uint32_t>;  // first < second
using EdgeList = std::vector<Edge>;

/// n key rings of K keys each, stored back to back; every ring is sorted.
class KeyRings {
public:
    KeyRings() = default;
    KeyRings(std::uint32_t count, std::uint32_t ring_size)
        : ring_size_(ring_size), keys_(std::size_t{count} * ring_size) {}

    std::uint32_t size() const { return ring_size_ == 0 ? 0 : static_cast<std::uint32_t>(keys_.size() / ring_size_); }
    std::uint32_t ring_size() const { return ring_size_; }

    std::span<const std::uint32_t> operator[](std::uint32_t node) const {
        return {keys_.data() + std::size_t{node} * ring_size_, ring_size_};
    }
    std::span<std::uint32_t> mutable_ring(std::uint32_t node) {
        return {keys_.data() + std::size_t{node} * ring_size_, ring_size_};
    }

private:
    std::uint32_t ring_size_ = 0;
    std::vector<std::uint32_t> keys_;
};

/// Draws uniform K-subsets of [0, P) with Floyd's algorithm. Keeps a
/// membership bitmap between calls so large subsets stay linear.
class SubsetSampler {
public:
    void sample(std::uint32_t size, std::uint32_t pool, RandomStream& rng, std::span<std::uint32_t> out) {
        if (size > pool) throw InvalidParameter("cannot draw more keys than the pool holds");
        if (size <= kSmallSubset) {
            std::size_t filled = 0;
            for (std::uint32_t j = pool - size; j < pool; ++j) {
                const auto t = static_cast<std::uint32_t>(rng.below(std::uint64_t{j} + 1));
                const bool seen = std::find(out.begin(), out.begin() + filled, t) != out.begin() + filled;
                out[filled++] = seen ? j : t;
            }
        } else {
            if (member_.size() < pool) member_.resize(pool, 0);
            std::size_t filled = 0;
            for (std::uint32_t j = pool - size; j < pool; ++j) {
                const auto t = static_cast<std::uint32_t>(rng.below(std::uint64_t{j} + 1));
                const std::uint32_t pick = member_[t] ? j : t;
                member_[pick] = 1;
                out[filled++] = pick;
            }
            for (std::uint32_t key : out) member_[key] = 0;
        }
        std::sort(out.begin(), out.end());
    }

private:
    static constexpr std::uint32_t kSmallSubset = 32;
    std::vector<std::uint8_t> member_;
};

/// n independent uniform K-subsets of the pool, n = params.node_count.
inline KeyRings sample_key_rings(const SchemeParams& params, RandomStream& rng) {
    params.validate();
    KeyRings rings(params.node_count, params.key_ring_size);
    SubsetSampler sampler;
    for (std::uint32_t node = 0; node < params.node_count; ++node)
        sampler.sample(params.key_ring_size, params.key_pool_size, rng, rings.mutable_ring(node));
    return rings;
}

inline std::vector<Point> sample_positions(std::uint32_t count, RandomStream& rng) {
    std::vector<Point> points(count);
    for (auto& p : points) {
        p.x = rng.uniform();
        p.y = rng.uniform();
    }
    return points;
}

inline double torus_distance_squared(const Point& a, const Point& b) {
    double dx = std::abs(a.x - b.x);
    double dy = std::abs(a.y - b.y);
    dx = std::min(dx, 1.0 - dx);
    dy = std::min(dy, 1.0 - dy);
    return dx * dx + dy * dy;
}

inline double torus_distance(const Point& a, const Point& b) { return std::sqrt(torus_distance_squared(a, b)); }

/// Size of the intersection of two sorted rings.
inline std::uint32_t shared_key_count(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    std::uint32_t shared = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++shared;
            ++i;
            ++j;
        }
    }
    return shared;
}

/// Bucket grid on the unit torus with cells at least r wide, so every pair
/// within distance r lies in the same or an adjacent (wrapped) cell.
class TorusGrid {
public:
    TorusGrid(std::span<const Point> points, double radius) : points_(points) {
        const double cells = std::floor(1.0 / radius);
        side_ = cells >= 3.0 ? static_cast<std::uint32_t>(std::min(cells, 4096.0)) : 1;
        const std::size_t cell_count = std::size_t{side_} * side_;
        start_.assign(cell_count + 1, 0);
        cell_of_.resize(points.size());
        for (std::uint32_t i = 0; i < points.size(); ++i) {
            cell_of_[i] = cell_index(points[i]);
            ++start_[cell_of_[i] + 1];
        }
        std::partial_sum(start_.begin(), start_.end(), start_.begin());
        members_.resize(points.size());
        std::vector<std::uint32_t> cursor(start_.begin(), start_.end() - 1);
        for (std::uint32_t i = 0; i < points.size(); ++i) members_[cursor[cell_of_[i]]++] = i;
    }

    std::uint32_t side() const { return side_; }

    /// Calls visit(i, j) with i < j once for every pair in neighbouring cells.
    template <typename Visit>
    void for_each_candidate_pair(Visit&& visit) const {
        if (side_ == 1) {
            const auto n = static_cast<std::uint32_t>(points_.size());
            for (std::uint32_t i = 0; i < n; ++i)
                for (std::uint32_t j = i + 1; j < n; ++j) visit(i, j);
            return;
        }
        for (std::uint32_t cy = 0; cy < side_; ++cy)
            for (std::uint32_t cx = 0; cx < side_; ++cx) {
                const auto home = cell(cx, cy);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const auto other = cell((cx + side_ + dx) % side_, (cy + side_ + dy) % side_);
                        for (auto a = start_[home]; a < start_[home + 1]; ++a)
                            for (auto b = start_[other]; b < start_[other + 1]; ++b)
                                if (members_[a] < members_[b]) visit(members_[a], members_[b]);
                    }
            }
    }

    /// Calls visit(j) for every point in the cells around point i, i included.
    template <typename Visit>
    void for_each_candidate_of(std::uint32_t i, Visit&& visit) const {
        if (side_ == 1) {
            for (std::uint32_t j = 0; j < points_.size(); ++j) visit(j);
            return;
        }
        const std::uint32_t cx = cell_of_[i] % side_;
        const std::uint32_t cy = cell_of_[i] / side_;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const auto other = cell((cx + side_ + dx) % side_, (cy + side_ + dy) % side_);
                for (auto b = start_[other]; b < start_[other + 1]; ++b) visit(members_[b]);
            }
    }

private:
    std::uint32_t cell(std::uint32_t cx, std::uint32_t cy) const { return cy * side_ + cx; }
    std::uint32_t cell_index(const Point& p) const {
        auto cx = static_cast<std::uint32_t>(p.x * side_);
        auto cy = static_cast<std::uint32_t>(p.y * side_);
        return cell(std::min(cx, side_ - 1), std::min(cy, side_ - 1));
    }

    std::span<const Point> points_;
    std::uint32_t side_ = 1;
    std::vector<std::uint32_t> start_;
    std::vector<std::uint32_t> members_;
    std::vector<std::uint32_t> cell_of_;
};

inline EdgeList geometric_edges(std::span<const Point> points, double radius) {
    EdgeList edges;
    const double limit = radius * radius;
    TorusGrid(points, radius).for_each_candidate_pair([&](std::uint32_t i, std::uint32_t j) {
        if (torus_distance_squared(points[i], points[j]) <= limit) edges.emplace_back(i, j);
    });
    std::sort(edges.begin(), edges.end());
    return edges;
}

namespace detail {

/// Calls accept(i, j) for each pair i < j sharing at least q keys, found
/// through an inverted key -> holders index. Pairs arrive grouped by i but
/// with j unordered.
template <typename Accept>
void for_each_key_pair(const KeyRings& rings, std::uint32_t pool, std::uint32_t threshold, Accept&& accept) {
    const std::uint32_t n = rings.size();
    std::vector<std::uint32_t> start(std::size_t{pool} + 1, 0);
    for (std::uint32_t node = 0; node < n; ++node)
        for (std::uint32_t key : rings[node]) ++start[key + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<std::uint32_t> holders(start.back());
    std::vector<std::uint32_t> cursor(start.begin(), start.end() - 1);
    for (std::uint32_t node = 0; node < n; ++node)
        for (std::uint32_t key : rings[node]) holders[cursor[key]++] = node;

    std::vector<std::uint32_t> shared(n, 0);
    std::vector<std::uint32_t> touched;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t key : rings[i])
            for (auto h = start[key]; h < start[key + 1]; ++h) {
                const std::uint32_t j = holders[h];
                if (j <= i) continue;
                if (shared[j]++ == 0) touched.push_back(j);
            }
        for (std::uint32_t j : touched) {
            if (shared[j] >= threshold) accept(i, j);
            shared[j] = 0;
        }
        touched.clear();
    }
}

}  // namespace detail

/// Pairs sharing at least q keys.
inline EdgeList key_graph_edges(const KeyRings& rings, std::uint32_t pool, std::uint32_t threshold) {
    EdgeList edges;
    detail::for_each_key_pair(rings, pool, threshold, [&](std::uint32_t i, std::uint32_t j) { edges.emplace_back(i, j); });
    std::sort(edges.begin(), edges.end());
    return edges;
}

struct NetworkInstance {
    SchemeParams params;
    double radius = 0.0;
    KeyRings key_rings;
    std::vector<Point> positions;
    EdgeList key_graph_edges;  // filled only when requested
    EdgeList geo_graph_edges;  // filled only when requested
    EdgeList secure_edges;
    std::vector<std::uint32_t> captured;
    bool hardened = false;
};

inline NetworkInstance sample_instance(const SchemeParams& params, double radius, RandomStream& rng) {
    if (params.node_count < 1) throw InvalidParameter("a network needs at least one node");
    if (!(radius > 0.0 && radius <= 0.5)) throw InvalidParameter("transmission radius must lie in (0, 1/2]");
    NetworkInstance instance;
    instance.params = params;
    instance.radius = radius;
    instance.key_rings = sample_key_rings(params, rng);
    instance.positions = sample_positions(params.node_count, rng);
    return instance;
}

struct GraphRequest {
    bool key_graph = false;
    bool geo_graph = false;
};

/// Secure edges: pairs within distance r sharing at least q keys. Sparse key
/// graphs are walked through the inverted key index; otherwise grid
/// candidates are checked against a bitset of each node's keys.
inline void build_secure_graph(NetworkInstance& instance, GraphRequest request = {}) {
    const auto& rings = instance.key_rings;
    const auto& points = instance.positions;
    const std::uint32_t threshold = instance.params.overlap_threshold;
    const std::uint32_t pool = instance.params.key_pool_size;
    const double limit = instance.radius * instance.radius;
    auto& edges = instance.secure_edges;
    edges.clear();

    // Work per node: about nK^2/P holder visits against n pi r^2 K key probes.
    const double ring = rings.ring_size();
    if (ring / pool < std::numbers::pi * limit / 2) {
        detail::for_each_key_pair(rings, pool, threshold, [&](std::uint32_t i, std::uint32_t j) {
            if (torus_distance_squared(points[i], points[j]) <= limit) edges.emplace_back(i, j);
        });
        std::sort(edges.begin(), edges.end());
    } else {
        const TorusGrid grid(points, instance.radius);
        std::vector<std::uint64_t> held((std::size_t{pool} + 63) / 64, 0);
        for (std::uint32_t i = 0; i < points.size(); ++i) {
            for (auto key : rings[i]) held[key >> 6] |= std::uint64_t{1} << (key & 63);
            grid.for_each_candidate_of(i, [&](std::uint32_t j) {
                if (j <= i || torus_distance_squared(points[i], points[j]) > limit) return;
                std::uint32_t shared = 0;
                for (auto key : rings[j]) {
                    shared += static_cast<std::uint32_t>((held[key >> 6] >> (key & 63)) & 1);
                    if (shared == threshold) {
                        edges.emplace_back(i, j);
                        return;
                    }
                }
            });
            for (auto key : rings[i]) held[key >> 6] = 0;
        }
        std::sort(edges.begin(), edges.end());
    }
    if (request.key_graph) instance.key_graph_edges = key_graph_edges(rings, pool, threshold);
    if (request.geo_graph) instance.geo_graph_edges = geometric_edges(points, instance.radius);
}

class UnionFind {
public:
    explicit UnionFind(std::uint32_t n) : parent_(n), size_(n, 1), components_(n) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --components_;
        return true;
    }

    std::uint32_t components() const { return components_; }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
    std::uint32_t components_;
};

inline bool is_connected(std::span<const Edge> edges, std::uint32_t n) {
    if (n == 0) throw DomainError("connectivity of an empty graph is undefined");
    UnionFind sets(n);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) throw InvalidParameter("edge endpoint out of range");
        if (sets.unite(a, b) && sets.components() == 1) return true;
    }
    return sets.components() == 1;
}

/// Connectivity of the subgraph induced on nodes with alive[i] set.
inline bool is_connected_among(std::span<const Edge> edges, const std::vector<bool>& alive) {
    const auto n = static_cast<std::uint32_t>(alive.size());
    const auto survivors = static_cast<std::uint32_t>(std::count(alive.begin(), alive.end(), true));
    if (survivors == 0) throw DomainError("connectivity of an empty graph is undefined");
    UnionFind sets(n);
    std::uint32_t merges = 0;
    for (const auto& [a, b] : edges)
        if (alive[a] && alive[b] && sets.unite(a, b) && ++merges + 1 == survivors) return true;
    return merges + 1 == survivors;
}

/// Uniformly random m-subset of [0, n) by a partial Fisher-Yates shuffle.
inline std::vector<std::uint32_t> sample_captured(std::uint32_t n, std::uint32_t captures, RandomStream& rng) {
    if (captures > n) throw InvalidParameter("cannot capture more nodes than exist");
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    for (std::uint32_t i = 0; i < captures; ++i)
        std::swap(order[i], order[i + rng.below(n - i)]);
    order.resize(captures);
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace qcomp
