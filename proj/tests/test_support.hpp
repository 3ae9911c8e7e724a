#pragma once

// Independent oracles and fixtures shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "iss/iss.hpp"

namespace iss::support {

// Seven-node instance with its p-values, 0-based.
inline std::vector<Point> seven_node_points() {
    return {Point{0, 5}, Point{1, 2.5}, Point{2.5, 1}, Point{5.5, 2}, Point{3, 3}, Point{7, 3.5}, Point{4, 4.25}};
}

inline std::vector<double> seven_node_pvalues() { return {0.01, 0.1, 0.3, 0.04, 0.01, 0.1, 0.03}; }

inline std::vector<Edge> one_based(std::initializer_list<std::tuple<int, int, int>> edges) {
    std::vector<Edge> out;
    for (auto [a, b, w] : edges) out.push_back({static_cast<Index>(a - 1), static_cast<Index>(b - 1), w});
    std::sort(out.begin(), out.end(),
              [](const Edge& x, const Edge& y) { return std::tie(x.from, x.to) < std::tie(y.from, y.to); });
    return out;
}

// Literal reading of the cover clause with index refinement: z_a sits below
// z_b iff z_a ≼ z_b and (z_a != z_b or a < b).
inline bool below(const std::vector<Point>& z, Index a, Index b) {
    if (a == b) return false;
    if (!dominates(z[a], z[b])) return false;
    return !(z[a] == z[b]) || a < b;
}

// Brute-force edge set: (i0, i1) is an edge iff i1 is below i0 and every i2
// with z_{i1} ≼ z_{i2} ≼ z_{i0} coincides with an endpoint under the index
// clauses ("z_{i2} = z_{i0} and i0 <= i2" or "z_{i2} = z_{i1} and i2 <= i1").
inline std::vector<Edge> brute_force_dag(const std::vector<Point>& z) {
    const std::size_t m = z.size();
    std::vector<Edge> out;
    for (Index i0 = 0; i0 < m; ++i0) {
        for (Index i1 = 0; i1 < m; ++i1) {
            if (!below(z, i1, i0)) continue;
            bool cover = true;
            for (Index i2 = 0; i2 < m && cover; ++i2) {
                if (i2 == i0 || i2 == i1) continue;
                if (!(dominates(z[i1], z[i2]) && dominates(z[i2], z[i0]))) continue;
                const bool at_top = z[i2] == z[i0] && i0 <= i2;
                const bool at_bottom = z[i2] == z[i1] && i2 <= i1;
                if (!at_top && !at_bottom) cover = false;
            }
            if (cover) out.push_back({i0, i1, 0});
        }
    }
    return out;
}

inline std::vector<Edge> brute_force_weights(const std::vector<Point>& z, std::vector<Edge> edges) {
    for (Edge& e : edges) {
        bool best = true;
        const double d = sup_distance(z[e.from], z[e.to]);
        for (const Edge& f : edges) {
            if (f.to != e.to || f.from == e.from) continue;
            const double df = sup_distance(z[f.from], z[f.to]);
            if (df < d || (df == d && f.from < e.from)) best = false;
        }
        e.weight = best ? 1 : 0;
    }
    return edges;
}

// B(z; a, b) by 5-point Gauss-Legendre on the mesh t_j = z (j/N)^4, graded
// towards 0 so the t^{a-1} endpoint behaviour is resolved. For b < 1 the
// singularity at t = 1 lies outside [0, z].
inline double quadrature_incomplete_beta(double z, double a, double b, int panels = 1000000) {
    static const double nodes[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                    0.9061798459386640};
    static const double weights[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                      0.2369268850561891, 0.2369268850561891};
    auto mesh = [&](int j) {
        const double r = static_cast<double>(j) / panels;
        return z * (r * r) * (r * r);
    };
    long double total = 0.0L;
    double lo = 0.0;
    for (int p = 1; p <= panels; ++p) {
        const double hi = mesh(p);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        long double panel = 0.0L;
        for (int k = 0; k < 5; ++k) {
            const double t = mid + half * nodes[k];
            panel += weights[k] * std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t));
        }
        total += panel * half;
        lo = hi;
    }
    return static_cast<double>(total);
}

inline double quadrature_regularized_beta(double z, double a, double b, int panels = 1000000) {
    return quadrature_incomplete_beta(z, a, b, panels) / std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

inline bool is_g_upper(const WeightedDag& dag, const std::vector<Index>& rejected) {
    std::set<Index> r(rejected.begin(), rejected.end());
    for (Index i : rejected) {
        for (Index p : dag.parents(i)) {
            if (!r.count(p)) return false;
        }
    }
    return true;
}

inline LabeledSample sample_from(const std::vector<Point>& pts, const std::vector<double>& y) {
    LabeledSample s(pts.at(0).dim());
    for (std::size_t i = 0; i < pts.size(); ++i) s.push_back(pts[i], y[i]);
    return s;
}

inline std::vector<Point> random_points(Rng& rng, std::size_t m, std::size_t d, int grid, bool duplicates) {
    std::uniform_int_distribution<int> coord(0, grid);
    std::vector<Point> pts;
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, pts.empty() ? 0 : pts.size() - 1);
        if (duplicates && !pts.empty() && (rng() % 4 == 0)) {
            pts.push_back(pts[pick(rng)]);
            continue;
        }
        std::vector<double> c(d);
        for (double& v : c) v = coord(rng);
        pts.emplace_back(std::move(c));
    }
    return pts;
}

// Bottleneck design points: every atom z_(j1,j2) at least once (random
// multiplicity), plus points in A, in shuffled index order. i*_j is the
// largest index at z_(j,q).
struct BottleneckInstance {
    std::vector<Point> points;
    std::vector<Index> in_a;
    Index star1 = 0, star2 = 0;
};

inline BottleneckInstance bottleneck_instance(int q, std::size_t d, std::size_t a_points, Rng& rng) {
    std::vector<Point> pts;
    for (int j1 = 1; j1 <= 2; ++j1) {
        for (int j2 = 1; j2 <= q; ++j2) {
            const int copies = 1 + static_cast<int>(rng() % 3);
            for (int c = 0; c < copies; ++c) pts.push_back(bottleneck_atom(d, q, j1, j2));
        }
    }
    std::uniform_real_distribution<double> unif(0.0, 0.5);
    for (std::size_t k = 0; k < a_points; ++k) {
        std::vector<double> x(d);
        for (double& v : x) v = unif(rng);
        x[1] += 0.5;
        pts.emplace_back(std::move(x));
    }
    std::shuffle(pts.begin(), pts.end(), rng);
    BottleneckInstance inst;
    inst.points = pts;
    const Point s1 = bottleneck_atom(d, q, 1, q), s2 = bottleneck_atom(d, q, 2, q);
    for (Index i = 0; i < pts.size(); ++i) {
        if (pts[i] == s1) inst.star1 = i;
        if (pts[i] == s2) inst.star2 = i;
        if (pts[i][0] <= 0.5 && pts[i][1] >= 0.5) inst.in_a.push_back(i);
    }
    return inst;
}

}  // namespace iss::support
