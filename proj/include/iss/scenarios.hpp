#pragma once

// Synthetic distributions for simulation studies: the fourteen rescaled
// regression functions on Unif([0,1]^d) and the bottleneck construction that
// starves budget-propagation procedures.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "iss/common.hpp"
#include "iss/geometry.hpp"
#include "iss/rng.hpp"
#include "iss/special_functions.hpp"

namespace iss {

enum class ScenarioId { A, B, C, D, E, F, G, H, I, J, K, L, M, N, Bottleneck };

inline std::string to_string(ScenarioId id) {
    if (id == ScenarioId::Bottleneck) return "bottleneck";
    return std::string(1, static_cast<char>('a' + static_cast<int>(id)));
}

inline ScenarioId parse_scenario_id(const std::string& name) {
    if (name == "bottleneck") return ScenarioId::Bottleneck;
    if (name.size() == 1 && name[0] >= 'a' && name[0] <= 'n') {
        return static_cast<ScenarioId>(name[0] - 'a');
    }
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

struct BottleneckParams {
    int q = 5;
    double M = 1.0;
    double lambda = 1.0;
    double gamma = 1.0;
};

struct ScenarioSpec {
    ScenarioId id = ScenarioId::A;
    std::size_t dim = 2;
    double sigma = 0.25;
    double tau = 0.5;
    BottleneckParams bottleneck;
};

namespace detail {

inline double signed_cbrt(double t) { return std::cbrt(t); }

inline double raw_function(ScenarioId id, PointView x) {
    const std::size_t d = x.size();
    double acc = 0.0;
    switch (id) {
        case ScenarioId::A:
            for (double v : x) acc += v;
            return acc;
        case ScenarioId::B: {
            double best = x[0];
            for (double v : x) best = std::max(best, v);
            return best;
        }
        case ScenarioId::C: {
            double best = x[0];
            for (double v : x) best = std::min(best, v);
            return best;
        }
        case ScenarioId::D: return (x[0] > 0.5 && x[0] <= 1.0) ? 1.0 : 0.0;
        case ScenarioId::E:
            for (double v : x) acc += (v - 0.5) * (v - 0.5) * (v - 0.5);
            return acc;
        case ScenarioId::F: return x[0];
        case ScenarioId::G:
            for (double v : x) acc += v;
            return std::exp(acc);
        case ScenarioId::H:
            for (double v : x) acc += v - 0.5;
            return 1.0 / (1.0 + std::exp(-4.0 * acc));
        case ScenarioId::I:
            for (double v : x) acc += v * v * v;
            return acc;
        case ScenarioId::J:
            for (double v : x) acc += (v - 1.0) * (v - 1.0) * (v - 1.0);
            return acc;
        case ScenarioId::K:
            for (double v : x) acc += std::ceil(6.0 * v) / 6.0;
            return acc;
        case ScenarioId::L:
            require(d == 2, "scenario (l) requires d = 2");
            return std::sqrt(x[0]) + x[1];
        case ScenarioId::M:
            for (double v : x) acc += v - 0.5;
            return signed_cbrt(acc);
        case ScenarioId::N:
            for (double v : x) acc += v - 0.5;
            return acc * acc * acc;
        case ScenarioId::Bottleneck: break;
    }
    throw invariant_error("raw_function called for the bottleneck scenario");
}

// (1/d) (Γ(1 + d/3) / (2 Γ(4/3)^d))^{3/d}
inline double cubic_tau(std::size_t d) {
    const double dd = static_cast<double>(d);
    const double log_ratio = special::log_gamma(1.0 + dd / 3.0) - std::log(2.0) -
                             dd * special::log_gamma(4.0 / 3.0);
    return std::exp(3.0 / dd * log_ratio) / dd;
}

inline std::vector<double> bottleneck_corner(std::size_t d) {
    std::vector<double> xa(d, 0.0);
    xa[1] = 0.5;
    return xa;
}

}  // namespace detail

/// Threshold for which the superlevel set has (approximately) half the mass.
inline double scenario_tau(ScenarioId id, std::size_t d) {
    require(d >= 1, "dimension must be >= 1");
    const double dd = static_cast<double>(d);
    switch (id) {
        case ScenarioId::A:
        case ScenarioId::D:
        case ScenarioId::E:
        case ScenarioId::F:
        case ScenarioId::H:
        case ScenarioId::M:
        case ScenarioId::N: return 0.5;
        case ScenarioId::B: return std::pow(2.0, -1.0 / dd);
        case ScenarioId::C: return 1.0 - std::pow(2.0, -1.0 / dd);
        case ScenarioId::G: return std::expm1(dd / 2.0) / std::expm1(dd);
        case ScenarioId::I: return detail::cubic_tau(d);
        case ScenarioId::J: return 1.0 - detail::cubic_tau(d);
        case ScenarioId::K: return 7.0 / 12.0;
        case ScenarioId::L:
            require(d == 2, "scenario (l) requires d = 2");
            return 0.584;
        case ScenarioId::Bottleneck: return 0.5;
    }
    throw std::invalid_argument("invalid scenario id");
}

/// Default noise level by dimension: 1/4, 1/16, 1/64 for d = 2, 3, 4.
inline double default_sigma(std::size_t d) {
    switch (d) {
        case 3: return 1.0 / 16.0;
        case 4: return 1.0 / 64.0;
        default: return 0.25;
    }
}

inline ScenarioSpec make_scenario(ScenarioId id, std::size_t d, std::optional<double> sigma = std::nullopt,
                                  std::optional<double> tau = std::nullopt,
                                  BottleneckParams bottleneck = {}) {
    require(d >= 1, "dimension must be >= 1");
    if (id == ScenarioId::L) require(d == 2, "scenario (l) requires d = 2");
    if (id == ScenarioId::Bottleneck) {
        require(d >= 2, "the bottleneck scenario requires d >= 2");
        require(bottleneck.q >= 1, "bottleneck q must be >= 1");
        require(bottleneck.M > 0.0, "bottleneck M must be positive");
        require(bottleneck.lambda > 0.0 && bottleneck.gamma > 0.0, "bottleneck lambda, gamma must be positive");
    }
    ScenarioSpec spec;
    spec.id = id;
    spec.dim = d;
    spec.sigma = sigma.value_or(default_sigma(d));
    require(spec.sigma > 0.0, "scenario sigma must be positive");
    spec.tau = tau.value_or(scenario_tau(id, d));
    spec.bottleneck = bottleneck;
    return spec;
}

/// Rescaled regression function (f(x) - f(0)) / (f(1_d) - f(0)), or the
/// bottleneck function tau + lambda min_j (x_j - x_A_j)^gamma above x_A and
/// tau - M elsewhere.
inline double regression_value(const ScenarioSpec& spec, PointView x) {
    require(x.size() == spec.dim, "point dimension does not match the scenario");
    if (spec.id == ScenarioId::Bottleneck) {
        const auto xa = detail::bottleneck_corner(spec.dim);
        if (!dominates(xa, x)) return spec.tau - spec.bottleneck.M;
        double gap = x[0] - xa[0];
        for (std::size_t j = 1; j < spec.dim; ++j) gap = std::min(gap, x[j] - xa[j]);
        return spec.tau + spec.bottleneck.lambda * std::pow(gap, spec.bottleneck.gamma);
    }
    if (spec.id == ScenarioId::K) {
        // integer step count over one division, so ties with tau are exact
        double steps = 0.0;
        for (double v : x) steps += std::ceil(6.0 * v);
        return steps / (6.0 * static_cast<double>(spec.dim));
    }
    const std::vector<double> zero(spec.dim, 0.0);
    const std::vector<double> one(spec.dim, 1.0);
    const double f0 = detail::raw_function(spec.id, zero);
    const double f1 = detail::raw_function(spec.id, one);
    return (detail::raw_function(spec.id, x) - f0) / (f1 - f0);
}

inline bool superlevel_member(const ScenarioSpec& spec, PointView x) {
    return regression_value(spec, x) >= spec.tau;
}

/// One draw from the covariate marginal.
inline std::vector<double> sample_covariate(const ScenarioSpec& spec, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> x(spec.dim);
    if (spec.id != ScenarioId::Bottleneck) {
        for (double& v : x) v = unif(rng);
        return x;
    }
    // mass 1/2^d on A = [0,1/2] x [1/2,1] x [0,1/2]^{d-2}, the rest split
    // evenly over the 2q atoms z_(j1,j2) = (j1 - 1, j2/(2q) - 1, 0, ..., 0)
    const double mass_a = std::ldexp(1.0, -static_cast<int>(spec.dim));
    if (unif(rng) < mass_a) {
        for (double& v : x) v = 0.5 * unif(rng);
        x[1] += 0.5;
        return x;
    }
    const int q = spec.bottleneck.q;
    std::uniform_int_distribution<int> atom(0, 2 * q - 1);
    const int a = atom(rng);
    const int j1 = a / q + 1;
    const int j2 = a % q + 1;
    x[0] = j1 - 1.0;
    x[1] = j2 / (2.0 * q) - 1.0;
    return x;
}

inline Point bottleneck_atom(std::size_t d, int q, int j1, int j2) {
    std::vector<double> x(d, 0.0);
    x[0] = j1 - 1.0;
    x[1] = j2 / (2.0 * q) - 1.0;
    return Point(std::move(x));
}

/// n pairs with X from the scenario marginal and Y | X ~ N(eta(X), sigma^2).
inline LabeledSample sample_dataset(const ScenarioSpec& spec, std::size_t n, Rng& rng) {
    require(n >= 1, "sample size must be >= 1");
    std::normal_distribution<double> noise(0.0, 1.0);
    LabeledSample data(spec.dim);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = sample_covariate(spec, rng);
        const double y = regression_value(spec, x) + spec.sigma * noise(rng);
        data.push_back(x, y);
    }
    return data;
}

inline LabeledSample sample_dataset(const ScenarioSpec& spec, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return sample_dataset(spec, n, rng);
}

}  // namespace iss
