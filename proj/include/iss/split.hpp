#pragma once

// Split-sample fixed-sequence baselines: the first half of the data decides
// the testing order, the second half supplies the tested p-values.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "iss/select.hpp"

namespace iss {

using TruthFunction = std::function<double(PointView)>;

inline SelectedUpperSet select_split(const LabeledSample& data, double tau, double alpha, double sigma,
                                     const PValueKind& kind, const std::optional<TruthFunction>& oracle_eta = {}) {
    const std::size_t n = data.size();
    require(n >= 2, "the split-sample procedures require n >= 2");
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    if (kind.needs_sigma()) require(sigma > 0.0, "sigma must be positive");

    const std::size_t n1 = (n + 1) / 2;
    LabeledSample second(data.dim());
    for (Index i = n1; i < n; ++i) second.push_back(data.x(i), data.y(i));
    const std::size_t m2 = second.size();

    const auto tested = pvalue_batch(second, m2, kind, sigma, tau);
    const auto points = points_of(second, m2);

    std::vector<Index> order(m2);
    std::iota(order.begin(), order.end(), Index{0});
    if (oracle_eta) {
        std::vector<double> eta(m2);
        for (Index j = 0; j < m2; ++j) eta[j] = (*oracle_eta)(points[j]);
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return eta[a] > eta[b]; });
    } else {
        const LabeledSample first = data.head(n1);
        const LabeledSample evidence = prepare_evidence(first, kind, sigma, tau);
        std::vector<double> guide(m2);
        for (Index j = 0; j < m2; ++j) {
            const auto y = ordered_responses(nn_ordering(points[j], evidence), evidence);
            guide[j] = log_pvalue_ordered(y, kind, sigma, tau).value();
        }
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return guide[a] < guide[b]; });
    }

    auto rejected = reject_fixed_sequence(order, tested.values, alpha);
    // report generators as indices into the full sample
    std::vector<Point> all_points = points_of(data, n);
    for (Index& i : rejected) i += n1;
    return SelectedUpperSet(all_points, std::move(rejected),
                            {tau, alpha, sigma, n, kind, oracle_eta ? Procedure::SplitOracle : Procedure::Split});
}

}  // namespace iss
