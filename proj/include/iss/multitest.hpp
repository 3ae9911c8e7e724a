#pragma once

// Familywise-error controlling procedures over DAG-structured hypotheses.

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "iss/common.hpp"
#include "iss/dag.hpp"

namespace iss {

struct RejectionResult {
    std::vector<Index> rejected;  // sorted ascending
    std::size_t rounds = 0;       // iterations that produced new rejections
    // Budget of every node at each iteration, recorded only on request.
    std::vector<std::vector<double>> budget_snapshots;

    bool contains(Index i) const { return std::binary_search(rejected.begin(), rejected.end(), i); }
};

namespace detail {

inline void check_alpha(double alpha) { require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)"); }

inline std::vector<Index> to_index_set(const std::vector<char>& flags) {
    std::vector<Index> out;
    for (Index i = 0; i < flags.size(); ++i) {
        if (flags[i]) out.push_back(i);
    }
    return out;
}

// Mark i and all of its G-ancestors as rejected.
inline void reject_with_ancestors(const WeightedDag& dag, Index i, std::vector<char>& rejected) {
    std::vector<Index> stack{i};
    rejected[i] = 1;
    while (!stack.empty()) {
        const Index j = stack.back();
        stack.pop_back();
        for (Index p : dag.parents(j)) {
            if (!rejected[p]) {
                rejected[p] = 1;
                stack.push_back(p);
            }
        }
    }
}

}  // namespace detail

/// Iterative polyforest-budget procedure. Each round splits alpha over the
/// unrejected forest leaves; every candidate (unrejected, forest parent
/// rejected or absent) receives the share of the leaves in its forest
/// subtree. Rejections propagate to all G-ancestors.
inline RejectionResult reject_iss(const WeightedDag& dag, std::span<const double> p, double alpha,
                                  bool record_budgets = false) {
    detail::check_alpha(alpha);
    const std::size_t m = dag.node_count();
    require(p.size() == m, "p-value count must equal the node count");

    RejectionResult result;
    std::vector<char> rejected(m, 0);
    std::size_t rejected_count = 0;
    std::vector<std::size_t> leaf_count(m);
    std::vector<double> budget(m);
    const auto& order = dag.reverse_topological_order();

    for (std::size_t iteration = 0; iteration < m; ++iteration) {
        std::size_t total_leaves = 0;
        for (Index i : order) {
            std::size_t count = (!rejected[i] && dag.is_leaf(i, Layer::Forest)) ? 1 : 0;
            for (Index c : dag.forest_children(i)) count += leaf_count[c];
            leaf_count[i] = count;
            if (!rejected[i] && dag.is_leaf(i, Layer::Forest)) ++total_leaves;
        }
        ensure(total_leaves > 0, "no unrejected forest leaf while hypotheses remain");

        std::vector<Index> newly;
        for (Index i = 0; i < m; ++i) {
            const auto parent = dag.forest_parent(i);
            const bool candidate = !rejected[i] && (!parent || rejected[*parent]);
            budget[i] = candidate ? static_cast<double>(leaf_count[i]) * alpha / static_cast<double>(total_leaves)
                                  : 0.0;
            if (p[i] <= budget[i]) newly.push_back(i);
        }
        if (record_budgets) result.budget_snapshots.push_back(budget);
        if (newly.empty()) break;

        ++result.rounds;
        for (Index i : newly) detail::reject_with_ancestors(dag, i, rejected);
        rejected_count = static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), 1));
        if (rejected_count == m) break;
    }
    result.rejected = detail::to_index_set(rejected);
    return result;
}

/// Fixed-sequence testing: reject the longest prefix of `order` whose
/// p-values are all at most alpha.
inline std::vector<Index> reject_fixed_sequence(std::span<const Index> order, std::span<const double> p,
                                                double alpha) {
    detail::check_alpha(alpha);
    require(order.size() == p.size(), "order must be a permutation of the hypotheses");
    std::vector<char> seen(p.size(), 0);
    for (Index i : order) {
        require(i < p.size() && !seen[i], "order must be a permutation of the hypotheses");
        seen[i] = 1;
    }
    std::vector<Index> out;
    for (Index i : order) {
        if (!(p[i] <= alpha)) break;
        out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Holm step-down: reject while p_(j) <= alpha / (m - j + 1).
inline std::vector<Index> reject_holm(std::span<const double> p, double alpha) {
    detail::check_alpha(alpha);
    const std::size_t m = p.size();
    std::vector<Index> order(m);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return p[a] < p[b]; });
    std::vector<Index> out;
    for (std::size_t j = 0; j < m; ++j) {
        if (!(p[order[j]] <= alpha / static_cast<double>(m - j))) break;
        out.push_back(order[j]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

enum class MgVariant { AllParent = 0, AnyParent = 1 };

struct MgConfig {
    MgVariant variant = MgVariant::AllParent;
    // Weight per G-leaf; empty means uniform.
    std::map<Index, double> leaf_weights;
};

/// Sequential rejection with budget propagation from the leaves towards the
/// roots along a reverse topological order.
inline RejectionResult reject_mg(const WeightedDag& dag, std::span<const double> p, double alpha,
                                 const MgConfig& config = {}, bool record_budgets = false) {
    detail::check_alpha(alpha);
    const std::size_t m = dag.node_count();
    require(p.size() == m, "p-value count must equal the node count");

    const auto leaves = dag.leaves(Layer::Full);
    std::vector<double> weight(m, 0.0);
    if (config.leaf_weights.empty()) {
        for (Index i : leaves) weight[i] = 1.0;
    } else {
        require(config.leaf_weights.size() == leaves.size(), "leaf weights must cover exactly the leaves");
        for (Index i : leaves) {
            auto it = config.leaf_weights.find(i);
            require(it != config.leaf_weights.end(), "leaf weights must cover exactly the leaves");
            require(it->second > 0.0, "leaf weights must be positive");
            weight[i] = it->second;
        }
    }

    RejectionResult result;
    std::vector<char> rejected(m, 0);
    std::vector<double> budget(m);
    const auto& order = dag.reverse_topological_order();

    for (std::size_t iteration = 0; iteration < m; ++iteration) {
        double total_weight = 0.0;
        for (Index i : leaves) {
            if (!rejected[i]) total_weight += weight[i];
        }
        if (total_weight <= 0.0) break;

        std::fill(budget.begin(), budget.end(), 0.0);
        for (Index i : leaves) {
            if (!rejected[i]) budget[i] = alpha * (weight[i] / total_weight);
        }
        for (Index i : order) {
            const auto& parents = dag.parents(i);
            std::size_t open = 0;
            for (Index q : parents) open += rejected[q] ? 0 : 1;
            if (open == 0) continue;
            const double share = budget[i];
            if (config.variant == MgVariant::AllParent) {
                for (Index q : parents) {
                    if (!rejected[q]) budget[q] += share / static_cast<double>(open);
                }
                budget[i] = 0.0;
            } else {
                const double per_parent = share / static_cast<double>(parents.size());
                for (Index q : parents) {
                    if (!rejected[q]) budget[q] += per_parent;
                }
                budget[i] = static_cast<double>(parents.size() - open) * per_parent;
            }
        }
        if (record_budgets) result.budget_snapshots.push_back(budget);

        std::vector<Index> newly;
        for (Index i = 0; i < m; ++i) {
            if (p[i] <= budget[i]) newly.push_back(i);
        }
        if (newly.empty()) break;
        ++result.rounds;
        for (Index i : newly) {
            if (config.variant == MgVariant::AnyParent) {
                detail::reject_with_ancestors(dag, i, rejected);
            } else {
                rejected[i] = 1;
            }
        }
    }
    result.rejected = detail::to_index_set(rejected);
    return result;
}

}  // namespace iss
