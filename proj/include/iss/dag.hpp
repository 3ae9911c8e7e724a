#pragma once

// Induced DAG, induced polyforest and the polyforest-weighted DAG over a
// sequence of covariate points.
//
// Edges point from the larger point to the covered smaller one. Equal points
// are ordered by index (the larger index sits above), so a run of duplicates
// forms a chain and the graph stays acyclic.

#include <algorithm>
#include <functional>
#include <iosfwd>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "iss/common.hpp"
#include "iss/geometry.hpp"

namespace iss {

struct Edge {
    Index from = 0;  // parent i0
    Index to = 0;    // child i1
    int weight = 0;  // 1 iff the edge belongs to the induced polyforest

    friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Layer { Full, Forest };
enum class Direction { Ancestors, Descendants };

class WeightedDag {
public:
    WeightedDag() = default;

    /// Build from an explicit edge list; validates acyclicity and the
    /// single-forest-parent property.
    WeightedDag(std::size_t node_count, std::vector<Edge> edges)
        : node_count_(node_count), edges_(std::move(edges)) {
        std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return std::tie(a.from, a.to) < std::tie(b.from, b.to);
        });
        parents_.assign(node_count_, {});
        children_.assign(node_count_, {});
        forest_children_.assign(node_count_, {});
        forest_parent_.assign(node_count_, std::nullopt);
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const Edge& edge = edges_[e];
            require(edge.from < node_count_ && edge.to < node_count_, "edge endpoint out of range");
            require(edge.from != edge.to, "self loops are not allowed");
            require(edge.weight == 0 || edge.weight == 1, "edge weights must be 0 or 1");
            require(e == 0 || edges_[e - 1].from != edge.from || edges_[e - 1].to != edge.to,
                    "duplicate edge");
            parents_[edge.to].push_back(edge.from);
            children_[edge.from].push_back(edge.to);
            if (edge.weight == 1) {
                require(!forest_parent_[edge.to].has_value(),
                        "a node has more than one weight-1 parent");
                forest_parent_[edge.to] = edge.from;
                forest_children_[edge.from].push_back(edge.to);
            }
        }
        for (auto& p : parents_) std::sort(p.begin(), p.end());
        order_ = compute_reverse_topological_order();
    }

    std::size_t node_count() const noexcept { return node_count_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    const std::vector<Index>& parents(Index i) const { return parents_[i]; }
    const std::vector<Index>& children(Index i) const { return children_[i]; }
    std::optional<Index> forest_parent(Index i) const { return forest_parent_[i]; }
    const std::vector<Index>& forest_children(Index i) const { return forest_children_[i]; }

    bool is_leaf(Index i, Layer layer = Layer::Full) const {
        return layer == Layer::Full ? children_[i].empty() : forest_children_[i].empty();
    }
    bool is_root(Index i, Layer layer = Layer::Full) const {
        return layer == Layer::Full ? parents_[i].empty() : !forest_parent_[i].has_value();
    }

    std::vector<Index> leaves(Layer layer = Layer::Full) const {
        std::vector<Index> out;
        for (Index i = 0; i < node_count_; ++i) {
            if (is_leaf(i, layer)) out.push_back(i);
        }
        return out;
    }

    std::vector<Index> roots(Layer layer = Layer::Full) const {
        std::vector<Index> out;
        for (Index i = 0; i < node_count_; ++i) {
            if (is_root(i, layer)) out.push_back(i);
        }
        return out;
    }

    /// Descendants before ancestors; among incomparable ready nodes the
    /// smallest index comes first.
    const std::vector<Index>& reverse_topological_order() const noexcept { return order_; }

    /// Transitive closure from `from` (excluding it) along the chosen layer.
    std::vector<Index> reachability_closure(Index from, Direction direction, Layer layer = Layer::Full) const {
        require(from < node_count_, "node out of range");
        std::vector<char> seen(node_count_, 0);
        std::vector<Index> stack{from};
        std::vector<Index> out;
        while (!stack.empty()) {
            const Index i = stack.back();
            stack.pop_back();
            for_each_neighbour(i, direction, layer, [&](Index j) {
                if (!seen[j]) {
                    seen[j] = 1;
                    out.push_back(j);
                    stack.push_back(j);
                }
            });
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    template <class Fn>
    void for_each_neighbour(Index i, Direction direction, Layer layer, Fn&& fn) const {
        if (layer == Layer::Full) {
            const auto& adj = direction == Direction::Ancestors ? parents_[i] : children_[i];
            for (Index j : adj) fn(j);
        } else if (direction == Direction::Ancestors) {
            if (forest_parent_[i]) fn(*forest_parent_[i]);
        } else {
            for (Index j : forest_children_[i]) fn(j);
        }
    }

    friend bool operator==(const WeightedDag& a, const WeightedDag& b) {
        return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
    }

private:
    std::vector<Index> compute_reverse_topological_order() const {
        std::vector<std::size_t> pending(node_count_);
        std::priority_queue<Index, std::vector<Index>, std::greater<>> ready;
        for (Index i = 0; i < node_count_; ++i) {
            pending[i] = children_[i].size();
            if (pending[i] == 0) ready.push(i);
        }
        std::vector<Index> order;
        order.reserve(node_count_);
        while (!ready.empty()) {
            const Index i = ready.top();
            ready.pop();
            order.push_back(i);
            for (Index p : parents_[i]) {
                if (--pending[p] == 0) ready.push(p);
            }
        }
        ensure(order.size() == node_count_, "cycle detected in DAG");
        return order;
    }

    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<Index>> parents_;
    std::vector<std::vector<Index>> children_;
    std::vector<std::vector<Index>> forest_children_;
    std::vector<std::optional<Index>> forest_parent_;
    std::vector<Index> order_;
};

namespace detail {

inline bool lexicographic_less(PointView a, PointView b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Strict order used for the graph: b below a in ≼, with index tie-break on
// equal points (larger index above).
inline bool refined_below(PointView b, Index ib, PointView a, Index ia) {
    if (ia == ib || !dominates(b, a)) return false;
    return !same_point(a, b) || ib < ia;
}

}  // namespace detail

/// Edge set of the induced DAG, sorted by (from, to), all weights 0.
inline std::vector<Edge> induced_dag(const std::vector<Point>& points) {
    const std::size_t m = points.size();
    if (m == 0) return {};
    const std::size_t d = points[0].dim();
    for (const Point& p : points) require(p.dim() == d, "points must share a dimension");

    // Descending lexicographic order, larger index first among equal points:
    // a linear extension of the refined order, top elements first.
    std::vector<Index> order(m);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (detail::lexicographic_less(points[b], points[a])) return true;
        if (detail::lexicographic_less(points[a], points[b])) return false;
        return a > b;
    });

    std::vector<std::size_t> position(m);
    for (std::size_t r = 0; r < m; ++r) position[order[r]] = r;

    std::vector<Edge> edges;
    std::vector<Index> covers;
    for (Index top = 0; top < m; ++top) {
        covers.clear();
        // Everything below `top` comes after it in the linear extension.
        for (std::size_t r = position[top] + 1; r < m; ++r) {
            const Index c = order[r];
            if (!detail::refined_below(points[c], c, points[top], top)) continue;
            bool covered = false;
            for (Index k : covers) {
                if (detail::refined_below(points[c], c, points[k], k)) {
                    covered = true;
                    break;
                }
            }
            if (!covered) covers.push_back(c);
        }
        for (Index c : covers) edges.push_back({top, c, 0});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
    return edges;
}

/// Mark, for every node with parents, the edge from its sup-norm closest
/// parent (smallest index on ties) with weight 1.
inline std::vector<Edge> induced_polyforest_weights(const std::vector<Point>& points, std::vector<Edge> edges) {
    const std::size_t m = points.size();
    std::vector<std::optional<std::pair<double, Index>>> best(m);
    for (const Edge& e : edges) {
        require(e.from < m && e.to < m, "edge endpoint out of range");
        const double dist = sup_distance(points[e.from], points[e.to]);
        auto& slot = best[e.to];
        if (!slot || std::make_pair(dist, e.from) < *slot) slot = std::make_pair(dist, e.from);
    }
    for (Edge& e : edges) {
        e.weight = (best[e.to] && best[e.to]->second == e.from) ? 1 : 0;
    }
    return edges;
}

inline WeightedDag induced_weighted_dag(const std::vector<Point>& points) {
    return WeightedDag(points.size(), induced_polyforest_weights(points, induced_dag(points)));
}

inline std::vector<Point> points_of(const LabeledSample& data, std::size_t m) {
    require(m <= data.size(), "m must not exceed the sample size");
    std::vector<Point> pts;
    pts.reserve(m);
    for (Index i = 0; i < m; ++i) {
        auto x = data.x(i);
        pts.emplace_back(std::vector<double>(x.begin(), x.end()));
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Edge-list serialization: one "i0 i1 w" line per edge, 1-based indices,
// sorted by (i0, i1). The node count is not part of the format.

inline std::string serialize_edges(const WeightedDag& dag) {
    std::ostringstream out;
    for (const Edge& e : dag.edges()) {
        out << (e.from + 1) << ' ' << (e.to + 1) << ' ' << e.weight << '\n';
    }
    return out.str();
}

inline WeightedDag parse_edges(std::size_t node_count, const std::string& text) {
    std::istringstream in(text);
    std::vector<Edge> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        long long from = 0, to = 0;
        int w = -1;
        std::string extra;
        if (!(fields >> from >> to >> w) || (fields >> extra) || from < 1 || to < 1) {
            throw std::invalid_argument("malformed edge on line " + std::to_string(line_no));
        }
        edges.push_back({static_cast<Index>(from - 1), static_cast<Index>(to - 1), w});
    }
    return WeightedDag(node_count, std::move(edges));
}

}  // namespace iss
