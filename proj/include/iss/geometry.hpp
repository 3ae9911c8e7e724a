#pragma once

// Coordinate-wise partial order on R^d, sup-norm neighbour orderings and
// antichain (upper hull) representations.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "iss/common.hpp"

namespace iss {

using PointView = std::span<const double>;

// A covariate point with finite coordinates.
class Point {
public:
    Point() = default;
    explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {
        require(!coords_.empty(), "point must have dimension >= 1");
        for (double c : coords_) {
            require(std::isfinite(c), "point coordinates must be finite");
        }
    }
    Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

    std::size_t dim() const noexcept { return coords_.size(); }
    double operator[](std::size_t j) const { return coords_[j]; }
    const std::vector<double>& coords() const noexcept { return coords_; }
    PointView view() const noexcept { return coords_; }
    operator PointView() const noexcept { return coords_; }

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::vector<double> coords_;
};

// Row-major n x d covariate matrix plus responses.
class LabeledSample {
public:
    LabeledSample() = default;
    explicit LabeledSample(std::size_t dim) : dim_(dim) {
        require(dim >= 1, "sample dimension must be >= 1");
    }
    LabeledSample(std::size_t dim, std::vector<double> covariates, std::vector<double> responses)
        : dim_(dim), x_(std::move(covariates)), y_(std::move(responses)) {
        require(dim >= 1, "sample dimension must be >= 1");
        require(x_.size() == dim_ * y_.size(), "covariate matrix does not match response count");
        for (double c : x_) {
            require(std::isfinite(c), "covariates must be finite");
        }
    }

    void push_back(PointView x, double y) {
        require(x.size() == dim_, "point dimension does not match sample dimension");
        for (double c : x) {
            require(std::isfinite(c), "covariates must be finite");
        }
        x_.insert(x_.end(), x.begin(), x.end());
        y_.push_back(y);
    }

    std::size_t size() const noexcept { return y_.size(); }
    bool empty() const noexcept { return y_.empty(); }
    std::size_t dim() const noexcept { return dim_; }
    PointView x(std::size_t i) const { return PointView(x_).subspan(i * dim_, dim_); }
    double y(std::size_t i) const { return y_[i]; }
    const std::vector<double>& responses() const noexcept { return y_; }
    std::vector<double>& responses() noexcept { return y_; }
    const std::vector<double>& covariates() const noexcept { return x_; }

    // The first m covariate points, as a sample with the same responses.
    LabeledSample head(std::size_t m) const {
        require(m <= size(), "head size exceeds sample size");
        return LabeledSample(dim_, std::vector<double>(x_.begin(), x_.begin() + m * dim_),
                             std::vector<double>(y_.begin(), y_.begin() + m));
    }

private:
    std::size_t dim_ = 1;
    std::vector<double> x_;
    std::vector<double> y_;
};

/// True iff a ≼ b, i.e. every coordinate of a is at most the matching one of b.
inline bool dominates(PointView a, PointView b) {
    require(a.size() == b.size(), "dimension mismatch in dominates");
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (!(a[j] <= b[j])) {
            return false;
        }
    }
    return true;
}

inline bool same_point(PointView a, PointView b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

inline double sup_distance(PointView a, PointView b) {
    require(a.size() == b.size(), "dimension mismatch in sup_distance");
    double best = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        best = std::max(best, std::abs(a[j] - b[j]));
    }
    return best;
}

struct NeighbourOrdering {
    std::vector<Index> indices;     // 0-based dataset indices, nearest first
    std::vector<double> distances;  // matching sup-norm distances, nondecreasing

    std::size_t size() const noexcept { return indices.size(); }
    bool empty() const noexcept { return indices.empty(); }
};

/// Indices of all points X_i ≼ center sorted by sup-norm distance to center;
/// ties keep the original index order.
inline NeighbourOrdering nn_ordering(PointView center, const LabeledSample& data) {
    require(center.size() == data.dim(), "center dimension does not match data");
    std::vector<std::pair<double, Index>> found;
    for (Index i = 0; i < data.size(); ++i) {
        PointView xi = data.x(i);
        if (dominates(xi, center)) {
            found.emplace_back(sup_distance(xi, center), i);
        }
    }
    // pairs compare by (distance, index), which is the stable order
    std::sort(found.begin(), found.end());
    NeighbourOrdering out;
    out.indices.reserve(found.size());
    out.distances.reserve(found.size());
    for (const auto& [dist, idx] : found) {
        out.indices.push_back(idx);
        out.distances.push_back(dist);
    }
    return out;
}

inline NeighbourOrdering nn_ordering(PointView center, const std::vector<Point>& covariates) {
    LabeledSample sample(center.size());
    for (const Point& p : covariates) {
        sample.push_back(p, 0.0);
    }
    return nn_ordering(center, sample);
}

/// Indices of the minimal points: no other point lies below, and among
/// duplicates the smallest index is kept. Output is sorted ascending.
inline std::vector<Index> minimal_points(const std::vector<Point>& points) {
    std::vector<Index> order(points.size());
    std::iota(order.begin(), order.end(), Index{0});
    // Lexicographic ascending order is a linear extension of ≼.
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::lexicographical_compare(points[a].coords().begin(), points[a].coords().end(),
                                            points[b].coords().begin(), points[b].coords().end());
    });
    std::vector<Index> kept;
    for (Index i : order) {
        bool covered = false;
        for (Index k : kept) {
            if (dominates(points[k], points[i])) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            kept.push_back(i);
        }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

/// True iff some minimal point m satisfies m ≼ x.
inline bool upper_hull_contains(const std::vector<Point>& minimal, PointView x) {
    return std::any_of(minimal.begin(), minimal.end(),
                       [&](const Point& m) { return dominates(m, x); });
}

}  // namespace iss
