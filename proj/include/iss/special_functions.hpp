#pragma once

#include <cmath>
#include <limits>

#include "iss/common.hpp"

namespace iss::special {

// std::lgamma writes the global `signgam`; prefer the reentrant variant.
inline double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

inline double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

namespace detail {

inline constexpr int kMaxIterations = 300;
inline constexpr double kTolerance = 1e-15;

// Continued fraction for the incomplete beta function, modified Lentz.
inline double beta_continued_fraction(double z, double a, double b) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * z / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kTolerance) {
            return h;
        }
    }
    throw invariant_error("incomplete beta continued fraction did not converge");
}

inline void check_beta_args(double z, double a, double b) {
    require(z > 0.0 && z < 1.0, "incomplete beta requires 0 < z < 1");
    require(a > 0.0 && std::isfinite(a), "incomplete beta requires a > 0");
    require(b > 0.0 && std::isfinite(b), "incomplete beta requires b > 0");
}

// log of z^a (1-z)^b / a times the continued fraction, i.e. log B(z; a, b)
// on the branch where the fraction converges directly.
inline double log_incomplete_beta_direct(double z, double a, double b) {
    return a * std::log(z) + b * std::log1p(-z) + std::log(beta_continued_fraction(z, a, b)) -
           std::log(a);
}

}  // namespace detail

/// Regularized incomplete beta I_z(a, b) = B(z; a, b) / B(a, b).
inline double regularized_incomplete_beta(double z, double a, double b) {
    detail::check_beta_args(z, a, b);
    if (z > a / (a + b)) {
        return 1.0 - std::exp(detail::log_incomplete_beta_direct(1.0 - z, b, a) - log_beta(b, a));
    }
    return std::exp(detail::log_incomplete_beta_direct(z, a, b) - log_beta(a, b));
}

/// log B(z; a, b), accurate when B(z; a, b) is far below 1e-308.
inline double log_incomplete_beta(double z, double a, double b) {
    detail::check_beta_args(z, a, b);
    if (z > a / (a + b)) {
        const double upper = std::exp(detail::log_incomplete_beta_direct(1.0 - z, b, a) - log_beta(b, a));
        return log_beta(a, b) + std::log1p(-upper);
    }
    return detail::log_incomplete_beta_direct(z, a, b);
}

/// Unregularized incomplete beta B(z; a, b) = ∫_0^z t^{a-1} (1-t)^{b-1} dt.
inline double incomplete_beta(double z, double a, double b) {
    return std::exp(log_incomplete_beta(z, a, b));
}

}  // namespace iss::special
