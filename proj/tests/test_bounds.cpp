#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "volterra/bounds.hpp"

using namespace volterra;

namespace {
const LpExponent kInf = LpExponent::infinity();
}

TEST(LemmaBound, Examples) {
    EXPECT_DOUBLE_EQ(lemma_bound({0, 1, 1, kInf, 1}), 1.0);
    EXPECT_NEAR(lemma_bound({0, 1, 1, LpExponent(2.0), 1}), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(lemma_bound({2.5, 0, 3, LpExponent(1.5), 4}), 0.0);
    EXPECT_THROW(lemma_bound({-1, 1, 1, kInf, 1}), InvalidParameter);
}

TEST(LemmaBound, MonotoneInCDt) {
    for (LpExponent p : {kInf, LpExponent(1.0), LpExponent(2.0), LpExponent(3.5)}) {
        const double base = lemma_bound({1.3, 2.0, 0.7, p, 1.5});
        EXPECT_GE(lemma_bound({1.3, 2.1, 0.7, p, 1.5}), base);
        EXPECT_GE(lemma_bound({1.3, 2.0, 0.8, p, 1.5}), base);
        EXPECT_GE(lemma_bound({1.3, 2.0, 0.7, p, 1.6}), base);
    }
}

TEST(TheoremBound, Examples) {
    EXPECT_NEAR(theorem_term_bound({3, 1, 1, kInf, 1}), 1.0 / 6.0, 1e-16);
    EXPECT_NEAR(theorem_term_bound({1, 1, 1, LpExponent(2.0), 1}), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(theorem_term_bound({0, 7, 3, kInf, 2.5}), 2.5);
}

TEST(TheoremBound, RatioIdentity) {
    for (LpExponent p : {kInf, LpExponent(1.0), LpExponent(2.0), LpExponent(3.0)}) {
        const double D = 1.7, t = 0.9;
        for (int n = 0; n < 40; ++n) {
            const double ratio = theorem_term_bound({double(n + 1), D, t, p, 1}) / theorem_term_bound({double(n), D, t, p, 1});
            const double inv_p = p.is_endpoint() ? 1.0 : 1.0 / p.value();
            EXPECT_NEAR(ratio, majorant_rate(D, p) * t / std::pow(n + 1.0, inv_p), 1e-14 * ratio);
        }
    }
}

TEST(TheoremBound, IteratedLemmaReproducesTheorem) {
    // C_{n+1} = lemma_bound(n, C_n) at t = 1, so that the n-th term is C_n t^n.
    for (LpExponent p : {kInf, LpExponent(1.0), LpExponent(2.0), LpExponent(3.0)}) {
        const double D = 2.0, t = 1.3;
        double c = 1.0;
        for (int n = 0; n < 20; ++n) {
            const double expect = c * std::pow(t, n);
            EXPECT_NEAR(expect, theorem_term_bound({double(n), D, t, p, 1.0}), 1e-12 * expect);
            c = lemma_bound({double(n), D, 1.0, p, c});
        }
    }
}

TEST(TheoremBound, LogSpaceAboveOneFifty) {
    const double a = theorem_term_bound({151, 3, 1, kInf, 1});
    EXPECT_NEAR(std::log(a), 151 * std::log(3.0) - std::lgamma(152.0), 1e-10);
    EXPECT_TRUE(std::isfinite(theorem_term_bound({400, 50, 2, LpExponent(2.0), 1})));
    EXPECT_NEAR(theorem_term_bound({150, 3, 1, kInf, 1}) * 3.0 / 151.0 / a, 1.0, 1e-10);
}

TEST(ExpTail, Examples) {
    EXPECT_NEAR(exp_tail(0, 1, 1, 1), std::numbers::e - 1.0, 1e-15);
    EXPECT_EQ(exp_tail(3, 0, 1, 1), 0.0);
    double prev = exp_tail(0, 2, 1.5, 1);
    for (std::size_t n = 1; n < 60; ++n) {
        const double v = exp_tail(n, 2, 1.5, 1);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_LT(prev, 1e-30);
}

TEST(ExpTail, LargeArgumentMatchesDirectSum) {
    // Dt = 30: the subtraction form loses everything for large n.
    const double x = 30.0;
    double direct = 0.0, term = std::exp(-std::lgamma(81.0) + 80 * std::log(x));
    for (int k = 80; k < 400; ++k) {
        direct += term;
        term *= x / (k + 1);
    }
    EXPECT_NEAR(exp_tail(79, 10.0, 3.0, 1.0) / direct, 1.0, 1e-13);
}

TEST(LpSeriesTail, MatchesBruteForceSum) {
    const LpExponent p(2.0);
    const double D = 3.0, t = 1.0;
    for (std::size_t n : {0u, 3u, 10u}) {
        double brute = 0.0;
        for (int k = n + 1; k < 400; ++k) brute += theorem_term_bound({double(k), D, t, p, 1.0});
        EXPECT_NEAR(lp_series_tail(n, D, t, p, 1.0), brute, 1e-12 * brute);
    }
}

TEST(EmpiricalRatio, Examples) {
    std::vector<double> a;
    double term = 1.0;
    for (int n = 0; n < 10; ++n) {
        a.push_back(term);
        term *= 2.0 / (n + 1);
    }
    const auto r = empirical_ratio(a);
    for (std::size_t n = 0; n < r.size(); ++n) EXPECT_NEAR(r[n], 2.0 / (n + 1), 1e-15);
    for (double v : empirical_ratio(std::vector<double>(5, 3.0))) EXPECT_EQ(v, 1.0);
    EXPECT_EQ(empirical_ratio(std::vector<double>{1.0, 0.0, 0.0, 5.0}).size(), 1u);
    EXPECT_THROW(empirical_ratio(std::vector<double>{1.0, -1.0}), InvalidParameter);
}

TEST(SimplexOvershoot, MatchesLeadingTerm) {
    const TimeGrid g(1.0, 512);
    const auto o = trapezoid_simplex_overshoot(g, 10);
    EXPECT_EQ(o[0], 0.0);
    EXPECT_NEAR(o[1], 0.0, 1e-14);
    EXPECT_NEAR(o[2], 0.0, 1e-13);
    for (int n = 3; n <= 10; ++n) {
        const double lead = n * (n - 1.0) * (n - 2.0) / (12.0 * 512 * 512);
        EXPECT_NEAR(o[n] / lead, 1.0, 0.02) << n;
    }
}
