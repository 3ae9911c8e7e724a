#pragma once

// End-to-end selection: p-values at the first m covariates, a DAG testing
// procedure, and the upper hull of the rejected points. Regret and Type-I
// checks against a scenario's truth oracle.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "iss/common.hpp"
#include "iss/dag.hpp"
#include "iss/geometry.hpp"
#include "iss/multitest.hpp"
#include "iss/pvalues.hpp"
#include "iss/rng.hpp"
#include "iss/scenarios.hpp"

namespace iss {

enum class Procedure { ISS, Holm, MgAll, MgAny, FixedSequence, Split, SplitOracle };

inline std::string to_string(Procedure procedure) {
    switch (procedure) {
        case Procedure::ISS: return "iss";
        case Procedure::Holm: return "holm";
        case Procedure::MgAll: return "mg-all";
        case Procedure::MgAny: return "mg-any";
        case Procedure::FixedSequence: return "fs";
        case Procedure::Split: return "split";
        case Procedure::SplitOracle: return "split-or";
    }
    return "unknown";
}

inline Procedure parse_procedure(const std::string& name) {
    for (Procedure p : {Procedure::ISS, Procedure::Holm, Procedure::MgAll, Procedure::MgAny,
                        Procedure::FixedSequence, Procedure::Split, Procedure::SplitOracle}) {
        if (to_string(p) == name) return p;
    }
    throw std::invalid_argument("unknown procedure '" + name + "'");
}

inline bool needs_dag(Procedure procedure) {
    return procedure == Procedure::ISS || procedure == Procedure::MgAll || procedure == Procedure::MgAny;
}

struct SelectionMetadata {
    double tau = 0.0;
    double alpha = 0.05;
    double sigma = 1.0;
    std::size_t m = 0;
    PValueKind kind;
    Procedure procedure = Procedure::ISS;
};

class SelectedUpperSet {
public:
    SelectedUpperSet() = default;

    /// Upper hull of `points[generators]`; generator indices are 0-based.
    SelectedUpperSet(const std::vector<Point>& points, std::vector<Index> generators, SelectionMetadata metadata)
        : generator_indices_(std::move(generators)), metadata_(std::move(metadata)) {
        std::sort(generator_indices_.begin(), generator_indices_.end());
        std::vector<Point> selected;
        selected.reserve(generator_indices_.size());
        for (Index i : generator_indices_) {
            require(i < points.size(), "generator index out of range");
            selected.push_back(points[i]);
        }
        for (Index k : iss::minimal_points(selected)) minimal_points_.push_back(selected[k]);
    }

    const std::vector<Point>& minimal_points() const noexcept { return minimal_points_; }
    const std::vector<Index>& generator_indices() const noexcept { return generator_indices_; }
    const SelectionMetadata& metadata() const noexcept { return metadata_; }
    bool empty() const noexcept { return minimal_points_.empty(); }

    bool contains(PointView x) const { return upper_hull_contains(minimal_points_, x); }

private:
    std::vector<Point> minimal_points_;
    std::vector<Index> generator_indices_;
    SelectionMetadata metadata_;
};

/// d = 1 testing order: largest covariate first, smallest index on ties.
inline std::vector<Index> fixed_sequence_order(const std::vector<Point>& points) {
    for (const Point& p : points) require(p.dim() == 1, "the fixed-sequence procedure requires d = 1");
    std::vector<Index> order(points.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return points[a][0] > points[b][0]; });
    return order;
}

/// Rejection set of a DAG-free or DAG-based procedure on precomputed p-values.
/// `dag` must be supplied for ISS and the MG variants.
inline std::vector<Index> run_procedure(Procedure procedure, const std::vector<Point>& points,
                                        const WeightedDag* dag, std::span<const double> p, double alpha) {
    require(p.size() == points.size(), "one p-value per point is required");
    switch (procedure) {
        case Procedure::ISS:
            require(dag != nullptr, "ISS requires a DAG");
            return reject_iss(*dag, p, alpha).rejected;
        case Procedure::MgAll:
        case Procedure::MgAny: {
            require(dag != nullptr, "the MG procedures require a DAG");
            MgConfig config;
            config.variant = procedure == Procedure::MgAll ? MgVariant::AllParent : MgVariant::AnyParent;
            return reject_mg(*dag, p, alpha, config).rejected;
        }
        case Procedure::Holm: return reject_holm(p, alpha);
        case Procedure::FixedSequence: {
            const auto order = fixed_sequence_order(points);
            return reject_fixed_sequence(order, p, alpha);
        }
        case Procedure::Split:
        case Procedure::SplitOracle: break;
    }
    throw std::invalid_argument("procedure '" + to_string(procedure) + "' needs the split-sample entry point");
}

inline SelectedUpperSet select_iss(const LabeledSample& data, double tau, double alpha, double sigma, std::size_t m,
                                   const PValueKind& kind, Procedure procedure = Procedure::ISS) {
    require(m >= 1 && m <= data.size(), "m must satisfy 1 <= m <= n");
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    if (kind.needs_sigma()) require(sigma > 0.0, "sigma must be positive");
    require(procedure != Procedure::Split && procedure != Procedure::SplitOracle,
            "use select_split for the split-sample procedures");
    if (procedure == Procedure::FixedSequence) require(data.dim() == 1, "the fixed-sequence procedure requires d = 1");

    const auto pv = pvalue_batch(data, m, kind, sigma, tau);
    const auto points = points_of(data, m);
    std::optional<WeightedDag> dag;
    if (needs_dag(procedure)) dag.emplace(induced_weighted_dag(points));
    auto rejected = run_procedure(procedure, points, dag ? &*dag : nullptr, pv.values, alpha);
    return SelectedUpperSet(points, std::move(rejected), {tau, alpha, sigma, m, kind, procedure});
}

inline SelectedUpperSet select_iss(const LabeledSample& data, double tau, double alpha, double sigma,
                                   const PValueKind& kind, Procedure procedure = Procedure::ISS) {
    return select_iss(data, tau, alpha, sigma, data.size(), kind, procedure);
}

// ---------------------------------------------------------------------------
// Evaluation against a truth oracle.

struct RegretEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t draws = 0;
};

inline RegretEstimate regret_from_counts(std::size_t missed, std::size_t draws) {
    RegretEstimate out;
    out.draws = draws;
    out.estimate = static_cast<double>(missed) / static_cast<double>(draws);
    out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(draws));
    return out;
}

/// Fixed Monte Carlo sample from the marginal, reduced to the draws lying in
/// the true superlevel set; lets several selections share one set of draws.
struct RegretSample {
    std::vector<Point> superlevel_draws;
    std::size_t draws = 0;

    RegretEstimate evaluate(const SelectedUpperSet& selection) const {
        std::size_t missed = 0;
        for (const Point& x : superlevel_draws) missed += selection.contains(x) ? 0 : 1;
        return regret_from_counts(missed, draws);
    }
};

inline RegretSample make_regret_sample(const ScenarioSpec& scenario, std::size_t draws, std::uint64_t seed) {
    require(draws >= 1, "draws must be >= 1");
    Rng rng(seed);
    RegretSample sample;
    sample.draws = draws;
    for (std::size_t k = 0; k < draws; ++k) {
        auto x = sample_covariate(scenario, rng);
        if (superlevel_member(scenario, x)) sample.superlevel_draws.emplace_back(std::move(x));
    }
    return sample;
}

inline RegretEstimate estimate_regret(const SelectedUpperSet& selection, const ScenarioSpec& scenario,
                                      std::size_t draws, std::uint64_t seed) {
    return make_regret_sample(scenario, draws, seed).evaluate(selection);
}

struct TypeIResult {
    bool violated = false;
    std::optional<Point> witness;
};

/// A selected upper hull lies in the (upper) superlevel set iff every minimal
/// point does, so only the antichain is checked.
inline TypeIResult typeI_violation(const SelectedUpperSet& selection, const ScenarioSpec& scenario) {
    for (const Point& x : selection.minimal_points()) {
        if (!superlevel_member(scenario, x)) return {true, x};
    }
    return {};
}

}  // namespace iss
