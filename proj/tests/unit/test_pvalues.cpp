#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace iss;

namespace {

LabeledSample one_point(double y) {
    LabeledSample s(1);
    s.push_back(std::vector<double>{0.0}, y);
    return s;
}

// Direct (non-log) evaluation of the unknown-variance likelihood ratio terms.
std::vector<double> gauss_var_terms(const std::vector<double>& y, double tau) {
    std::vector<double> out;
    for (std::size_t k = 1; k <= y.size(); ++k) {
        double s0 = 0;
        for (std::size_t j = 0; j < k; ++j) s0 += std::pow(std::max(y[j] - tau, 0.0), 2);
        s0 /= k;
        if (s0 == 0) {
            out.push_back(1.0);
            continue;
        }
        double prod = 1.0;
        for (std::size_t j = 1; j <= k; ++j) {
            const std::size_t prev = j - 1;
            double mean = 0, var = 1;
            if (prev >= 1) {
                for (std::size_t i = 0; i < prev; ++i) mean += y[i];
                mean /= prev;
            }
            if (prev >= 2) {
                var = 0;
                for (std::size_t i = 0; i < prev; ++i) var += (y[i] - mean) * (y[i] - mean);
                var /= prev;
            }
            prod *= std::sqrt(var) * std::exp((y[j - 1] - mean) * (y[j - 1] - mean) / (2 * var));
        }
        out.push_back(prod / (std::pow(std::sqrt(s0), k) * std::exp(k / 2.0)));
    }
    return out;
}

}  // namespace

TEST(Boundaries, LilExamples) {
    const double u1 = 1.7 * std::sqrt(std::log(std::log(2.0)) + 0.72 * std::log(5.2 / 0.05));
    EXPECT_NEAR(lil_boundary(0.05, 1), u1, 1e-12);
    EXPECT_NEAR(lil_boundary(0.05, 1), 2.9335, 5e-4);
    EXPECT_NEAR(lil_boundary(0.05, 4), 6.8643, 5e-4);
    for (std::size_t k = 1; k < 200; ++k) EXPECT_LT(lil_boundary(0.05, k), lil_boundary(0.05, k + 1));
    EXPECT_THROW(lil_boundary(0.0, 1), std::invalid_argument);
    EXPECT_THROW(lil_boundary(1.0, 1), std::invalid_argument);
}

TEST(Boundaries, NormalMixtureExamples) {
    EXPECT_NEAR(nm_boundary(0.5, 1, 1), std::sqrt(4 * std::log(std::sqrt(2.0) + 1)), 1e-12);
    EXPECT_NEAR(nm_boundary(0.5, 1, 1), 1.8776, 5e-4);
    EXPECT_GT(nm_boundary(0.01, 0.5, 10), nm_boundary(0.05, 0.5, 10));
    const double v = nm_boundary(0.05, 0.5, 10);
    EXPECT_TRUE(std::isfinite(v) && v > 0);
    EXPECT_THROW(nm_boundary(0.05, 0, 1), std::invalid_argument);
}

TEST(FiniteLil, NoDominatedPoint) {
    EXPECT_EQ(pvalue_finite_lil(Point{-1.0}, one_point(5), 1, 0), 1.0);
}

TEST(FiniteLil, ZeroStatisticClamped) {
    auto r = log_pvalue_finite_lil(std::vector<double>{0.5}, 1, 0.5);
    EXPECT_NEAR(std::exp(r.log_p), 5.2 * std::exp(std::log(std::log(2.0)) / 0.72), 1e-12);
    EXPECT_NEAR(std::exp(r.log_p), 3.125, 1e-3);
    EXPECT_EQ(pvalue_finite_lil(Point{0.0}, one_point(0.5), 1, 0.5), 1.0);
}

TEST(FiniteLil, LargeStatistic) {
    const double expect = 5.2 * std::exp(-100 / 2.0808 + std::log(std::log(2.0)) / 0.72);
    const double p = pvalue_finite_lil(Point{0.0}, one_point(10), 1, 0);
    EXPECT_NEAR(p / expect, 1.0, 1e-12);
    EXPECT_NEAR(p, 4.2e-21, 0.05e-21);
}

TEST(FiniteLil, SigmaMustBePositive) {
    EXPECT_THROW(pvalue_finite_lil(Point{0.0}, one_point(1), 0, 0), std::invalid_argument);
    EXPECT_THROW(pvalue_finite_lil(Point{0.0}, one_point(1), -1, 0), std::invalid_argument);
}

TEST(FiniteLil, BoundaryDuality) {
    Rng rng(21);
    std::normal_distribution<double> g(0.3, 1);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> y(1 + rng() % 60);
        for (double& v : y) v = g(rng);
        for (double alpha : {0.01, 0.05, 0.2}) {
            const double p = log_pvalue_finite_lil(y, 1, 0).value();
            const auto s = partial_sums(y, 1, 0);
            bool crossed = false;
            for (std::size_t k = 1; k <= s.size(); ++k) crossed |= s[k - 1] - lil_boundary(alpha, k) >= 0;
            EXPECT_EQ(p <= alpha, crossed);
        }
    }
}

TEST(NormalMixture, NoDominatedPoint) {
    EXPECT_EQ(pvalue_normal_mixture(Point{-1.0}, one_point(5), 1, 0, 0.5), 1.0);
}

TEST(NormalMixture, ZeroStatisticIsInfinite) {
    auto r = log_pvalue_normal_mixture(std::vector<double>{0.0}, 1, 0, 0.5);
    EXPECT_TRUE(std::isinf(r.log_p));
    EXPECT_EQ(r.value(), 1.0);
}

TEST(NormalMixture, SinglePoint) {
    const double expect = std::sqrt(1.5 / 2) / std::expm1(25.0 / 3);
    const double p = pvalue_normal_mixture(Point{0.0}, one_point(5), 1, 0, 0.5);
    EXPECT_NEAR(p / expect, 1.0, 1e-12);
    EXPECT_NEAR(p, 2.0816e-4, 1e-7);
}

TEST(NormalMixture, BoundaryDuality) {
    Rng rng(22);
    std::normal_distribution<double> g(0.3, 1);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> y(1 + rng() % 60);
        for (double& v : y) v = g(rng);
        const double alpha = 0.05;
        const double p = log_pvalue_normal_mixture(y, 1, 0, 0.5).value();
        const auto s = partial_sums(y, 1, 0);
        double margin = -INFINITY;
        for (std::size_t k = 1; k <= s.size(); ++k) margin = std::max(margin, s[k - 1] - nm_boundary(alpha, 0.5, k));
        if (std::abs(margin) > 1e-9) { EXPECT_EQ(p <= alpha, margin > 0); }
    }
}

TEST(PValues, ShiftScaleEquivariance) {
    Rng rng(23);
    std::normal_distribution<double> g(0, 1);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> y(1 + rng() % 40);
        for (double& v : y) v = g(rng) + 0.4;
        const double a = 0.5 + (rng() % 100) / 10.0, b = g(rng) * 5;
        std::vector<double> z(y);
        for (double& v : z) v = a * v + b;
        EXPECT_NEAR(log_pvalue_finite_lil(y, 1, 0).value(), log_pvalue_finite_lil(z, a, b).value(), 1e-12);
        EXPECT_NEAR(log_pvalue_normal_mixture(y, 1, 0, 0.5).value(), log_pvalue_normal_mixture(z, a, b, 0.5).value(),
                    1e-12);
    }
}

TEST(PValues, MonotoneInEvidence) {
    Rng rng(24);
    std::normal_distribution<double> g(0, 1);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> y(1 + rng() % 40);
        for (double& v : y) v = g(rng);
        std::vector<double> z(y);
        for (double& v : z) v += 0.25;
        EXPECT_LE(log_pvalue_finite_lil(z, 1, 0).value(), log_pvalue_finite_lil(y, 1, 0).value());
        EXPECT_LE(log_pvalue_normal_mixture(z, 1, 0, 0.5).value(), log_pvalue_normal_mixture(y, 1, 0, 0.5).value());
    }
}

TEST(PValues, NoOverflowForHugeStatistics) {
    std::vector<double> y(100, 100.0);  // S_k up to 10^4
    for (auto kind : {PValueKind::finite_lil(), PValueKind::normal_mixture(0.5), PValueKind::gaussian_unknown_variance()}) {
        auto r = log_pvalue_ordered(y, kind, 1, 0);
        EXPECT_TRUE(std::isfinite(r.log_p));
        EXPECT_GT(r.value(), 0.0);
        EXPECT_LE(r.value(), 1.0);
    }
}

TEST(GaussianUnknownVariance, AllBelowThreshold) {
    EXPECT_EQ(log_pvalue_gaussian_unknown_variance(std::vector<double>{-1, 0, -3}, 0).value(), 1.0);
}

TEST(GaussianUnknownVariance, SinglePointTermIsOne) {
    auto r = log_pvalue_gaussian_unknown_variance(std::vector<double>{1.0}, 0);
    EXPECT_NEAR(r.log_p, 0.0, 1e-15);
    EXPECT_EQ(r.value(), 1.0);
}

TEST(GaussianUnknownVariance, TwoEqualResponses) {
    auto r = log_pvalue_gaussian_unknown_variance(std::vector<double>{3, 3}, 0);
    const double second = std::exp(4.5) / (9 * std::exp(1.0));
    EXPECT_EQ(r.argmin_k, 2u);
    EXPECT_NEAR(std::exp(r.log_p) / second, 1.0, 1e-10);
}

TEST(GaussianUnknownVariance, MatchesDirectProduct) {
    Rng rng(25);
    std::normal_distribution<double> g(0.5, 1);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> y(1 + rng() % 12);
        for (double& v : y) v = g(rng);
        const auto terms = gauss_var_terms(y, 0.2);
        const double direct = std::min(1.0, *std::min_element(terms.begin(), terms.end()));
        const double got = log_pvalue_gaussian_unknown_variance(y, 0.2).value();
        EXPECT_NEAR(got / direct, 1.0, 1e-9);
    }
}

TEST(IncompleteBetaPValue, NoDominatedPoint) {
    EXPECT_EQ(pvalue_incomplete_beta(Point{-1.0}, one_point(1), 0.5), 1.0);
}

TEST(IncompleteBetaPValue, SingleSuccess) {
    EXPECT_NEAR(pvalue_incomplete_beta(Point{0.0}, one_point(1), 0.5), 2.0 / 3.0, 1e-14);
}

TEST(IncompleteBetaPValue, AllZeros) {
    for (std::size_t k = 1; k <= 5; ++k) {
        std::vector<double> y(k, 0.0);
        EXPECT_EQ(log_pvalue_incomplete_beta(y, 0.3).value(), 1.0);
    }
}

TEST(IncompleteBetaPValue, MonotoneInSuccessCountByEnumeration) {
    // Λ_k is nondecreasing in S_k: each term with s successes is at most the
    // one with s - 1.
    for (std::size_t k = 1; k <= 5; ++k) {
        for (std::size_t s = 1; s <= k; ++s) {
            std::vector<double> more(k, 0.0), fewer(k, 0.0);
            for (std::size_t j = 0; j < s; ++j) more[j] = 1;
            for (std::size_t j = 0; j + 1 < s; ++j) fewer[j] = 1;
            auto term = [&](const std::vector<double>& y) {
                const double sum = std::accumulate(y.begin(), y.end(), 0.0);
                return sum * std::log(0.4) + (k - sum + 1) * std::log(0.6) -
                       special::log_incomplete_beta(0.6, k - sum + 1, sum + 1);
            };
            EXPECT_LE(term(more), term(fewer) + 1e-12);
        }
    }
}

TEST(IncompleteBetaPValue, ArgumentErrors) {
    EXPECT_THROW(pvalue_incomplete_beta(Point{0.0}, one_point(1.5), 0.5), std::invalid_argument);
    EXPECT_THROW(pvalue_incomplete_beta(Point{0.0}, one_point(1), 1.0), std::invalid_argument);
    EXPECT_THROW(pvalue_incomplete_beta(Point{0.0}, one_point(1), 0.0), std::invalid_argument);
}

TEST(PValueBatch, MatchesPointwise) {
    Rng rng(26);
    std::normal_distribution<double> g(0, 1);
    std::uniform_real_distribution<double> u(0, 1);
    LabeledSample data(2);
    for (int i = 0; i < 50; ++i) data.push_back(std::vector<double>{u(rng), u(rng)}, g(rng) + 0.5);
    auto lil = pvalue_batch(data, 50, PValueKind::finite_lil(), 1, 0);
    auto nm = pvalue_batch(data, 50, PValueKind::normal_mixture(0.5), 1, 0);
    auto gv = pvalue_batch(data, 50, PValueKind::gaussian_unknown_variance(), 1, 0);
    for (Index i = 0; i < 50; ++i) {
        EXPECT_EQ(lil[i], pvalue_finite_lil(data.x(i), data, 1, 0));
        EXPECT_EQ(nm[i], pvalue_normal_mixture(data.x(i), data, 1, 0, 0.5));
        EXPECT_EQ(gv[i], pvalue_gaussian_unknown_variance(data.x(i), data, 0));
        EXPECT_GT(lil[i], 0.0);
        EXPECT_LE(lil[i], 1.0);
    }
    auto one = pvalue_batch(data, 1, PValueKind::normal_mixture(0.5), 1, 0);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0], nm[0]);
    EXPECT_THROW(pvalue_batch(data, 51, PValueKind::finite_lil(), 1, 0), std::invalid_argument);
}

TEST(PValueBatch, DuplicatesShareValues) {
    LabeledSample data(2);
    data.push_back(std::vector<double>{0.5, 0.5}, 2.0);
    data.push_back(std::vector<double>{0.1, 0.2}, 1.0);
    data.push_back(std::vector<double>{0.5, 0.5}, 3.0);
    auto pv = pvalue_batch(data, 3, PValueKind::normal_mixture(0.5), 1, 0);
    EXPECT_EQ(pv[0], pv[2]);
}

TEST(PValueBatch, QuantileKindsComposeWithBinarization) {
    Rng rng(27);
    std::normal_distribution<double> g(0, 1);
    std::uniform_real_distribution<double> u(0, 1);
    LabeledSample data(2);
    for (int i = 0; i < 60; ++i) data.push_back(std::vector<double>{u(rng), u(rng)}, g(rng));
    const double tau = -0.3, theta = 0.4;
    const auto bin = quantile_binarize(data, tau);
    auto ql = pvalue_batch(data, 60, PValueKind::quantile_lil(theta), 123.0, tau);
    auto qb = pvalue_batch(data, 60, PValueKind::quantile_beta(theta), 0.0, tau);
    for (Index i = 0; i < 60; ++i) {
        EXPECT_EQ(ql[i], pvalue_finite_lil(data.x(i), bin, 0.5, 1 - theta));
        EXPECT_EQ(qb[i], pvalue_incomplete_beta(data.x(i), bin, 1 - theta));
    }
}

TEST(PValueBatch, SuperUniformUnderNull) {
    // scaled-down version of the acceptance check
    Rng rng(28);
    std::normal_distribution<double> g(0, 1);
    std::uniform_real_distribution<double> u(0, 1);
    const int reps = 400;
    int below = 0;
    for (int r = 0; r < reps; ++r) {
        LabeledSample data(2);
        for (int i = 0; i < 100; ++i) data.push_back(std::vector<double>{u(rng), u(rng)}, 0.4 + g(rng));
        below += pvalue_normal_mixture(Point{1, 1}, data, 1, 0.5, 0.5) <= 0.1;
    }
    const double rate = double(below) / reps;
    EXPECT_LE(rate, 0.1 + 3 * std::sqrt(0.1 * 0.9 / reps));
}

TEST(PValueKinds, NamesRoundTrip) {
    for (const char* name : {"lil", "nm", "gauss-var", "beta", "quantile-lil", "quantile-beta"}) {
        EXPECT_EQ(to_string(make_pvalue_kind(name)), name);
    }
    EXPECT_THROW(make_pvalue_kind("bogus"), std::invalid_argument);
    EXPECT_THROW(make_pvalue_kind("nm", -1), std::invalid_argument);
    EXPECT_THROW(make_pvalue_kind("quantile-lil", 0.5, 1.0), std::invalid_argument);
}

TEST(MartingaleTrace, IncrementsMatchResponses) {
    LabeledSample data(1);
    for (double x : {1.0, 2.0, 3.0}) data.push_back(std::vector<double>{x}, x);
    auto tr = martingale_trace(Point{3.0}, data, 2, 1);
    ASSERT_EQ(tr.count(), 3u);
    EXPECT_EQ(tr.partial_sums, (std::vector<double>{1.0, 1.5, 1.5}));
}
