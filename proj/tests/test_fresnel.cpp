#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "volterra/fresnel.hpp"

using namespace volterra;

namespace {
const double kPi = std::numbers::pi;
}

TEST(FresnelClosed, Examples) {
    const Complex one = fresnel_closed(1, 0.0);
    EXPECT_NEAR(one.real(), 1.2533141373155, 1e-12);
    EXPECT_NEAR(one.imag(), 1.2533141373155, 1e-12);
    EXPECT_NEAR(std::abs(fresnel_closed(2, 0.0) - Complex(0.0, kPi)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fresnel_closed(2, 1.0) - kPi * Complex(1.0, 1.0) / 2.0), 0.0, 1e-15);
    EXPECT_THROW(fresnel_closed(1, -0.1), InvalidParameter);
    EXPECT_THROW(fresnel_closed(0, 0.1), InvalidParameter);
}

TEST(FresnelClosed, ProductRule) {
    for (double a : {0.0, 0.01, 0.3, 2.0})
        for (int n = 1; n <= 8; ++n)
            EXPECT_NEAR(std::abs(std::pow(fresnel_closed(1, a), n) - fresnel_closed(n, a)), 0.0, 1e-12);
}

TEST(FresnelClosed, ContinuousAlongSchedule) {
    const auto s = AbelSchedule::geometric(21);
    for (int n = 1; n <= 4; ++n) {
        double prev = std::abs(fresnel_closed(n, s.alphas()[0]) - fresnel_closed(n, 0.0));
        for (double a : s.alphas()) {
            const double d = std::abs(fresnel_closed(n, a) - fresnel_closed(n, 0.0));
            EXPECT_LE(d, prev * (1 + 1e-12));
            prev = d;
        }
        EXPECT_LT(prev, 1e-4);
    }
}

TEST(FresnelClosed, PrincipalBranchHasPositiveRealRoot) {
    for (double a : {0.0, 1e-6, 0.5, 10.0}) EXPECT_GT(std::sqrt(Complex(a, -1.0)).real(), 0.0);
}

TEST(FresnelQuadrature, Examples) {
    EXPECT_NEAR(std::abs(fresnel_quadrature(1.0, 8.0, 1e-3) - fresnel_closed(1, 1.0)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(fresnel_quadrature(0.1, 30.0, 1e-3) - fresnel_closed(1, 0.1)), 0.0, 1e-4);
    EXPECT_LT(std::abs(fresnel_quadrature(2.0, 10.0, 1e-3) - fresnel_quadrature(2.0, 20.0, 1e-3)), 1e-12);
    EXPECT_THROW(fresnel_quadrature(0.0, 10.0, 1e-3), InvalidParameter);
    EXPECT_THROW(fresnel_quadrature(1.0, -1.0, 1e-3), InvalidParameter);
}

TEST(AbelLimit, Examples) {
    const auto s = AbelSchedule::geometric(21);
    const auto closed = abel_limit([](double a) { return fresnel_closed(1, a); }, s);
    EXPECT_LT(std::abs(closed.value - fresnel_closed(1, 0.0)), 1e-6);
    const auto constant = abel_limit([](double) { return Complex(2.0, -1.0); }, s);
    EXPECT_EQ(constant.value, Complex(2.0, -1.0));
    EXPECT_EQ(constant.error_estimate, 0.0);
    const auto line = abel_limit([](double a) { return Complex(3.0 + a, 1.0); }, s);
    EXPECT_NEAR(std::abs(line.value - Complex(3.0, 1.0)), 0.0, 1e-14);
    EXPECT_EQ(line.samples.size(), 21u);
}

TEST(AbelLimit, ExtrapolatedQuadratureReachesFresnelValue) {
    const auto s = AbelSchedule::geometric(13);
    const auto lim = abel_limit([](double a) { return fresnel_quadrature_auto(a); }, s);
    EXPECT_LT(std::abs(lim.value - fresnel_closed(1, 0.0)), 1e-6);
}

TEST(AbelSchedule, Validation) {
    EXPECT_THROW(AbelSchedule({1.0, 1.0}), InvalidParameter);
    EXPECT_THROW(AbelSchedule({1.0, -0.5}), InvalidParameter);
    EXPECT_THROW(AbelSchedule(std::vector<double>{}), InvalidParameter);
    EXPECT_EQ(AbelSchedule::geometric().size(), 21u);
    EXPECT_DOUBLE_EQ(AbelSchedule::geometric().alphas().back(), std::ldexp(1.0, -20));
}

TEST(GammaRoute, Examples) {
    EXPECT_NEAR(unit_sphere_area(1), 2.0, 1e-15);
    EXPECT_NEAR(unit_sphere_area(2), 2 * kPi, 1e-14);
    EXPECT_NEAR(std::abs(gamma_route(1) - std::sqrt(Complex(0.0, kPi))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(gamma_route(2) - Complex(0.0, kPi)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(gamma_route(4) - Complex(-kPi * kPi, 0.0)), 0.0, 1e-13);
    for (int n = 1; n <= 8; ++n) EXPECT_LT(std::abs(gamma_route(n) - fresnel_closed(n, 0.0)), 1e-12);
}

TEST(Gamma, StandardValues) {
    EXPECT_NEAR(std::tgamma(0.5), std::sqrt(kPi), 1e-15);
    double f = 1.0;
    for (int k = 1; k <= 10; ++k) {
        EXPECT_NEAR(std::tgamma(double(k)) / f, 1.0, 1e-13);
        f *= k;
    }
}

TEST(RadialForm, MatchesCartesianAndQuadrature) {
    for (int n = 1; n <= 6; ++n)
        for (double a : {0.0, 0.2, 1.0}) EXPECT_LT(std::abs(radial_abel_closed(n, a) - fresnel_closed(n, a)), 1e-12);
    // n = 2 and n = 4: the radial weight t^{(n-2)/2} is 1 and t.
    for (int n : {2, 4}) {
        const double a = 0.5, R = 120.0, h = 1e-3;
        Complex s{};
        const auto steps = static_cast<std::size_t>(R / h);
        for (std::size_t k = 0; k <= steps; ++k) {
            const double t = k * h;
            const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
            s += w * std::pow(t, (n - 2) / 2) * std::exp(-Complex(a, -1.0) * t);
        }
        const Complex radial = 0.5 * unit_sphere_area(n) * s * h;
        EXPECT_LT(std::abs(radial - radial_abel_closed(n, a)), 1e-6) << n;
    }
}
