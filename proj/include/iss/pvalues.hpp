#pragma once

// Anytime-valid p-values for H_0: eta(x) < tau, built from the responses of
// the dominated covariates taken in sup-norm nearest-neighbour order.
//
// Every construction is evaluated in log space; the reported p-value is
// 1 ∧ exp(min_k log p_k), floored at the smallest normal double so that it
// stays in (0, 1] even when the exponent underflows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iss/common.hpp"
#include "iss/geometry.hpp"
#include "iss/special_functions.hpp"
#include "iss/transforms.hpp"

namespace iss {

enum class PValueFamily {
    FiniteLIL,
    NormalMixture,
    GaussianUnknownVariance,
    IncompleteBeta,
    QuantileLIL,
    QuantileBeta,
};

struct PValueKind {
    PValueFamily family = PValueFamily::NormalMixture;
    double rho = 0.5;    // NormalMixture only
    double theta = 0.5;  // quantile level for the Quantile* families

    static PValueKind finite_lil() { return {PValueFamily::FiniteLIL}; }
    static PValueKind normal_mixture(double rho = 0.5) {
        require(rho > 0.0, "normal mixture rho must be positive");
        return {PValueFamily::NormalMixture, rho};
    }
    static PValueKind gaussian_unknown_variance() { return {PValueFamily::GaussianUnknownVariance}; }
    static PValueKind incomplete_beta() { return {PValueFamily::IncompleteBeta}; }
    static PValueKind quantile_lil(double theta) {
        require(theta > 0.0 && theta < 1.0, "quantile level must lie in (0, 1)");
        return {PValueFamily::QuantileLIL, 0.5, theta};
    }
    static PValueKind quantile_beta(double theta) {
        require(theta > 0.0 && theta < 1.0, "quantile level must lie in (0, 1)");
        return {PValueFamily::QuantileBeta, 0.5, theta};
    }

    bool needs_sigma() const {
        return family == PValueFamily::FiniteLIL || family == PValueFamily::NormalMixture;
    }

    friend bool operator==(const PValueKind&, const PValueKind&) = default;
};

inline std::string to_string(PValueFamily family) {
    switch (family) {
        case PValueFamily::FiniteLIL: return "lil";
        case PValueFamily::NormalMixture: return "nm";
        case PValueFamily::GaussianUnknownVariance: return "gauss-var";
        case PValueFamily::IncompleteBeta: return "beta";
        case PValueFamily::QuantileLIL: return "quantile-lil";
        case PValueFamily::QuantileBeta: return "quantile-beta";
    }
    return "unknown";
}

inline std::string to_string(const PValueKind& kind) { return to_string(kind.family); }

inline PValueFamily parse_pvalue_family(const std::string& name) {
    for (auto f : {PValueFamily::FiniteLIL, PValueFamily::NormalMixture,
                   PValueFamily::GaussianUnknownVariance, PValueFamily::IncompleteBeta,
                   PValueFamily::QuantileLIL, PValueFamily::QuantileBeta}) {
        if (to_string(f) == name) return f;
    }
    throw std::invalid_argument("unknown p-value kind '" + name + "'");
}

inline PValueKind make_pvalue_kind(const std::string& name, double rho = 0.5, double theta = 0.5) {
    switch (parse_pvalue_family(name)) {
        case PValueFamily::FiniteLIL: return PValueKind::finite_lil();
        case PValueFamily::NormalMixture: return PValueKind::normal_mixture(rho);
        case PValueFamily::GaussianUnknownVariance: return PValueKind::gaussian_unknown_variance();
        case PValueFamily::IncompleteBeta: return PValueKind::incomplete_beta();
        case PValueFamily::QuantileLIL: return PValueKind::quantile_lil(theta);
        case PValueFamily::QuantileBeta: return PValueKind::quantile_beta(theta);
    }
    throw invariant_error("unhandled p-value family");
}

// ---------------------------------------------------------------------------
// Time-uniform boundaries.

/// Finite-LIL boundary 1.7 sqrt(k (log log(2k) + 0.72 log(5.2/alpha))).
inline double lil_boundary(double alpha, std::size_t k) {
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(k >= 1, "boundary index k must be >= 1");
    const double kk = static_cast<double>(k);
    return 1.7 * std::sqrt(kk * (std::log(std::log(2.0 * kk)) + 0.72 * std::log(5.2 / alpha)));
}

/// Normal-mixture boundary sqrt(2 (k+rho) log(sqrt((k+rho)/rho) / (2 alpha) + 1)).
inline double nm_boundary(double alpha, double rho, std::size_t k) {
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(rho > 0.0, "rho must be positive");
    require(k >= 1, "boundary index k must be >= 1");
    const double kr = static_cast<double>(k) + rho;
    return std::sqrt(2.0 * kr * std::log(std::sqrt(kr / rho) / (2.0 * alpha) + 1.0));
}

// ---------------------------------------------------------------------------
// Log-space evaluation over responses already in nearest-neighbour order.

struct LogPValue {
    double log_p = 0.0;  // log of the unclamped minimum; +inf when no term is finite
    std::size_t argmin_k = 0;  // 1-based k attaining the minimum, 0 when none

    double value() const {
        if (!(log_p < 0.0)) return 1.0;
        return std::max(std::exp(log_p), std::numeric_limits<double>::min());
    }
};

namespace detail {

inline void take_min(LogPValue& best, double log_term, std::size_t k) {
    if (log_term < best.log_p) {
        best.log_p = log_term;
        best.argmin_k = k;
    }
}

inline LogPValue empty_log_pvalue() {
    return {std::numeric_limits<double>::infinity(), 0};
}

// log(e^x - 1) for x > 0 without overflow.
inline double log_expm1(double x) {
    if (x > 30.0) return x + std::log1p(-std::exp(-x));
    return std::log(std::expm1(x));
}

}  // namespace detail

inline std::vector<double> partial_sums(std::span<const double> ordered_y, double sigma, double tau) {
    std::vector<double> s;
    s.reserve(ordered_y.size());
    double acc = 0.0;
    for (double y : ordered_y) {
        acc += (y - tau) / sigma;
        s.push_back(acc);
    }
    return s;
}

inline LogPValue log_pvalue_finite_lil(std::span<const double> ordered_y, double sigma, double tau) {
    require(sigma > 0.0, "sigma must be positive");
    LogPValue best = detail::empty_log_pvalue();
    const double log52 = std::log(5.2);
    double s = 0.0;
    for (std::size_t k = 1; k <= ordered_y.size(); ++k) {
        s += (ordered_y[k - 1] - tau) / sigma;
        const double sp = std::max(s, 0.0);
        const double kk = static_cast<double>(k);
        const double term = log52 - sp * sp / (2.0808 * kk) + std::log(std::log(2.0 * kk)) / 0.72;
        detail::take_min(best, term, k);
    }
    return best;
}

inline LogPValue log_pvalue_normal_mixture(std::span<const double> ordered_y, double sigma, double tau,
                                           double rho) {
    require(sigma > 0.0, "sigma must be positive");
    require(rho > 0.0, "rho must be positive");
    LogPValue best = detail::empty_log_pvalue();
    double s = 0.0;
    for (std::size_t k = 1; k <= ordered_y.size(); ++k) {
        s += (ordered_y[k - 1] - tau) / sigma;
        if (s <= 0.0) continue;  // the term is +inf at a nonpositive statistic
        const double kr = static_cast<double>(k) + rho;
        const double term = 0.5 * std::log(kr / (4.0 * rho)) - detail::log_expm1(s * s / (2.0 * kr));
        detail::take_min(best, term, k);
    }
    return best;
}

/// Sequential likelihood-ratio p-value for Gaussian noise of unknown variance.
/// When the running unconstrained variance estimate is exactly zero it is
/// replaced by 1, the same convention used for prefixes of length 0 and 1.
inline LogPValue log_pvalue_gaussian_unknown_variance(std::span<const double> ordered_y, double tau) {
    LogPValue best = detail::empty_log_pvalue();
    double mean = 0.0;    // Ȳ_{1,j-1}
    double m2 = 0.0;      // Σ (Y - Ȳ)^2 over the prefix (Welford)
    double null_ss = 0.0; // Σ (Y - τ)_+^2
    double log_product = 0.0;
    for (std::size_t k = 1; k <= ordered_y.size(); ++k) {
        const double y = ordered_y[k - 1];
        const std::size_t prev = k - 1;
        double var_prev = 1.0;
        if (prev >= 2) {
            var_prev = m2 / static_cast<double>(prev);
            if (!(var_prev > 0.0)) var_prev = 1.0;
        }
        const double dev = y - (prev == 0 ? 0.0 : mean);
        log_product += 0.5 * std::log(var_prev) + dev * dev / (2.0 * var_prev);

        const double delta = y - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (y - mean);

        const double excess = std::max(y - tau, 0.0);
        null_ss += excess * excess;
        if (null_ss <= 0.0) continue;  // p^k := 1
        const double kk = static_cast<double>(k);
        const double term = -0.5 * kk * std::log(null_ss / kk) - 0.5 * kk + log_product;
        detail::take_min(best, term, k);
    }
    return best;
}

/// Beta-mixture likelihood-ratio p-value for [0,1]-valued responses.
inline LogPValue log_pvalue_incomplete_beta(std::span<const double> ordered_y, double tau) {
    require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1) for the incomplete-beta p-value");
    LogPValue best = detail::empty_log_pvalue();
    const double log_tau = std::log(tau);
    const double log_one_minus_tau = std::log1p(-tau);
    double s = 0.0;
    for (std::size_t k = 1; k <= ordered_y.size(); ++k) {
        const double y = ordered_y[k - 1];
        require(y >= 0.0 && y <= 1.0, "incomplete-beta p-value requires responses in [0, 1]");
        s += y;
        const double a = static_cast<double>(k) - s + 1.0;
        const double b = s + 1.0;
        const double term = s * log_tau + a * log_one_minus_tau -
                            special::log_incomplete_beta(1.0 - tau, a, b);
        detail::take_min(best, term, k);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Pointwise p-values.

struct MartingaleTrace {
    NeighbourOrdering ordering;
    std::vector<double> partial_sums;  // S_1..S_{n(x)}

    std::size_t count() const noexcept { return ordering.size(); }
};

inline std::vector<double> ordered_responses(const NeighbourOrdering& ordering, const LabeledSample& data) {
    std::vector<double> y;
    y.reserve(ordering.size());
    for (Index i : ordering.indices) y.push_back(data.y(i));
    return y;
}

inline MartingaleTrace martingale_trace(PointView center, const LabeledSample& data, double sigma,
                                        double tau) {
    require(sigma > 0.0, "sigma must be positive");
    MartingaleTrace trace;
    trace.ordering = nn_ordering(center, data);
    trace.partial_sums = partial_sums(ordered_responses(trace.ordering, data), sigma, tau);
    return trace;
}

inline double pvalue_finite_lil(PointView center, const LabeledSample& data, double sigma, double tau) {
    require(sigma > 0.0, "sigma must be positive");
    const auto y = ordered_responses(nn_ordering(center, data), data);
    return log_pvalue_finite_lil(y, sigma, tau).value();
}

inline double pvalue_normal_mixture(PointView center, const LabeledSample& data, double sigma, double tau,
                                    double rho) {
    require(sigma > 0.0, "sigma must be positive");
    require(rho > 0.0, "rho must be positive");
    const auto y = ordered_responses(nn_ordering(center, data), data);
    return log_pvalue_normal_mixture(y, sigma, tau, rho).value();
}

inline double pvalue_gaussian_unknown_variance(PointView center, const LabeledSample& data, double tau) {
    const auto y = ordered_responses(nn_ordering(center, data), data);
    return log_pvalue_gaussian_unknown_variance(y, tau).value();
}

inline void require_unit_interval_responses(const LabeledSample& data) {
    for (double y : data.responses()) {
        require(y >= 0.0 && y <= 1.0, "incomplete-beta p-value requires responses in [0, 1]");
    }
}

inline double pvalue_incomplete_beta(PointView center, const LabeledSample& data, double tau) {
    require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1) for the incomplete-beta p-value");
    require_unit_interval_responses(data);
    const auto y = ordered_responses(nn_ordering(center, data), data);
    return log_pvalue_incomplete_beta(y, tau).value();
}

/// Evaluate any kind on responses already in nearest-neighbour order. The
/// Quantile* kinds expect responses that are already binarized.
inline LogPValue log_pvalue_ordered(std::span<const double> ordered_y, const PValueKind& kind, double sigma,
                                    double tau) {
    switch (kind.family) {
        case PValueFamily::FiniteLIL: return log_pvalue_finite_lil(ordered_y, sigma, tau);
        case PValueFamily::NormalMixture: return log_pvalue_normal_mixture(ordered_y, sigma, tau, kind.rho);
        case PValueFamily::GaussianUnknownVariance: return log_pvalue_gaussian_unknown_variance(ordered_y, tau);
        case PValueFamily::IncompleteBeta: return log_pvalue_incomplete_beta(ordered_y, tau);
        case PValueFamily::QuantileLIL: return log_pvalue_finite_lil(ordered_y, 0.5, 1.0 - kind.theta);
        case PValueFamily::QuantileBeta: return log_pvalue_incomplete_beta(ordered_y, 1.0 - kind.theta);
    }
    throw invariant_error("unhandled p-value family");
}

inline bool is_quantile(const PValueKind& kind) {
    return kind.family == PValueFamily::QuantileLIL || kind.family == PValueFamily::QuantileBeta;
}

/// Validate (kind, sigma, tau) and return the evidence sample the kind reads:
/// the binarized sample for the quantile kinds, the input otherwise.
inline LabeledSample prepare_evidence(const LabeledSample& data, const PValueKind& kind, double sigma,
                                      double tau) {
    if (kind.needs_sigma()) require(sigma > 0.0, "sigma must be positive");
    if (kind.family == PValueFamily::NormalMixture) require(kind.rho > 0.0, "rho must be positive");
    if (is_quantile(kind)) {
        require(kind.theta > 0.0 && kind.theta < 1.0, "quantile level must lie in (0, 1)");
        return quantile_binarize(data, tau);
    }
    if (kind.family == PValueFamily::IncompleteBeta) {
        require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1) for the incomplete-beta p-value");
        require_unit_interval_responses(data);
    }
    return data;
}

/// Full pointwise evaluation with the diagnostic trace used by the CLI.
struct PValueReport {
    double p = 1.0;
    LogPValue log;
    MartingaleTrace trace;
};

inline PValueReport evaluate_pvalue(PointView center, const LabeledSample& data, const PValueKind& kind,
                                    double sigma, double tau) {
    const LabeledSample evidence = prepare_evidence(data, kind, sigma, tau);
    PValueReport report;
    report.trace.ordering = nn_ordering(center, evidence);
    const auto y = ordered_responses(report.trace.ordering, evidence);
    const double trace_sigma = kind.needs_sigma() ? sigma : (is_quantile(kind) ? 0.5 : (sigma > 0.0 ? sigma : 1.0));
    const double trace_tau = is_quantile(kind) ? 1.0 - kind.theta : tau;
    report.trace.partial_sums = partial_sums(y, trace_sigma, trace_tau);
    report.log = log_pvalue_ordered(y, kind, sigma, tau);
    report.p = report.log.value();
    return report;
}

// ---------------------------------------------------------------------------
// Batch evaluation.

struct PValueVector {
    std::vector<double> values;
    PValueKind kind;
    double tau = 0.0;
    double sigma = 1.0;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// p-values at X_1..X_m, each using all n pairs of `data` as evidence.
inline PValueVector pvalue_batch(const LabeledSample& data, std::size_t m, const PValueKind& kind, double sigma,
                                 double tau) {
    require(m <= data.size(), "m must not exceed the sample size");
    const LabeledSample evidence = prepare_evidence(data, kind, sigma, tau);
    PValueVector out{{}, kind, tau, sigma};
    out.values.reserve(m);
    for (Index i = 0; i < m; ++i) {
        const auto y = ordered_responses(nn_ordering(data.x(i), evidence), evidence);
        out.values.push_back(log_pvalue_ordered(y, kind, sigma, tau).value());
    }
    return out;
}

}  // namespace iss
