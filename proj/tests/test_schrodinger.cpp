#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "volterra/fresnel.hpp"
#include "volterra/oracle.hpp"
#include "volterra/schrodinger.hpp"

using namespace volterra;

namespace {
PropagatorPtr wide(std::size_t n = 1024) { return make_propagator(SpatialGrid(-20.0, 20.0, n)); }
double sup_diff(const WaveState& a, const WaveState& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.values().size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}
} // namespace

TEST(SpatialGrid, Validation) {
    EXPECT_THROW(SpatialGrid(0.0, 1.0, 12), InvalidParameter);
    EXPECT_THROW(SpatialGrid(0.0, 1.0, 4), InvalidParameter);
    EXPECT_THROW(SpatialGrid(1.0, 0.0, 16), InvalidParameter);
    SpatialGrid g(-1.0, 1.0, 8);
    EXPECT_DOUBLE_EQ(g.dx(), 0.25);
}

TEST(FreeKernel, Examples) {
    const PhysicalParams p;
    const Complex k = free_kernel(0.3, 0.3, 1.0, p);
    EXPECT_NEAR(std::abs(k - 1.0 / std::sqrt(Complex(0.0, 4.0 * std::numbers::pi))), 0.0, 1e-15);
    for (double x : {-2.0, 0.0, 5.0})
        for (double t : {0.5, -0.5, 3.0})
            EXPECT_NEAR(std::abs(free_kernel(x, 1.0, t, p)), std::sqrt(p.mass / (2 * std::numbers::pi * p.hbar * std::abs(t))), 1e-14);
    EXPECT_THROW(free_kernel(0.0, 0.0, 0.0, p), InvalidParameter);
    // n = 3 with the Example-2 normalization (4 pi i t)^{-3/2}.
    EXPECT_NEAR(std::abs(free_kernel(0.0, 0.0, 2.0, p, 3) - std::pow(Complex(0.0, 8.0 * std::numbers::pi), -1.5)), 0.0, 1e-15);
}

TEST(FreeEvolve, IdentityAtZero) {
    auto g = gaussian_packet(wide(), 1.0, 1.0, 2.0);
    EXPECT_EQ(sup_diff(free_evolve(g, 0.0), g), 0.0);
}

TEST(FreeEvolve, MatchesClosedFormAndIsUnitary) {
    auto prop = wide();
    auto g = gaussian_packet(prop, 1.0);
    auto u = free_evolve(g, 0.5);
    const auto exact = gaussian_closed_form({1.0, 0.0, 0.0, prop}, 0.5);
    double m = 0.0;
    for (std::size_t j = 0; j < exact.size(); ++j) m = std::max(m, std::abs(u[j] - exact[j]));
    EXPECT_LT(m, 1e-8);
    EXPECT_NEAR(u.l2_norm(), g.l2_norm(), 1e-12);
    EXPECT_NEAR(g.l2_norm(), 1.0, 1e-12);
}

TEST(FreeEvolve, GroupAndInverse) {
    auto g = gaussian_packet(wide(), 0.9, -1.0, 1.0);
    EXPECT_LT(sup_diff(free_evolve(free_evolve(g, 0.3), 0.4), free_evolve(g, 0.7)), 1e-12);
    EXPECT_LT(sup_diff(free_evolve(free_evolve(g, 0.6), -0.6), g), 1e-12);
}

TEST(FreeEvolve, NonDefaultParametersMatchClosedForm) {
    auto prop = make_propagator(SpatialGrid(-20.0, 20.0, 1024), PhysicalParams{0.7, 1.3});
    auto g = gaussian_packet(prop, 1.1, 0.5, -1.0);
    auto u = free_evolve(g, 0.8);
    const auto exact = gaussian_closed_form({1.1, 0.5, -1.0, prop}, 0.8);
    double m = 0.0;
    for (std::size_t j = 0; j < exact.size(); ++j) m = std::max(m, std::abs(u[j] - exact[j]));
    EXPECT_LT(m, 1e-12);
}

TEST(PoissonIntegral, MatchesSpectralEvolution) {
    auto prop = wide(1024);
    auto f = gaussian_packet(prop, 1.0);
    auto spectral = free_evolve(f, 0.5);
    auto quad = poisson_integral_quadrature(f, 0.5, 1e-3);
    EXPECT_LT(sup_diff(quad, spectral), 1e-3);
}

TEST(PoissonIntegral, ZeroDataAndBadArguments) {
    auto prop = wide(64);
    WaveState zero(prop, std::vector<Complex>(64));
    EXPECT_EQ(poisson_integral_quadrature(zero, 0.5, 0.1).l2_norm(), 0.0);
    EXPECT_THROW(poisson_integral_quadrature(zero, 0.0, 0.1), InvalidParameter);
    EXPECT_THROW(poisson_integral_quadrature(zero, 0.5, 0.0), InvalidParameter);
}

TEST(PoissonIntegral, AbelLimitApproachesSpectralMonotonically) {
    auto prop = wide(1024);
    auto f = gaussian_packet(prop, 1.0);
    auto spectral = free_evolve(f, 0.5);
    const std::size_t samples[] = {400, 480, 512, 560, 620};
    double alpha = 0.04;
    std::vector<double> prev(5, 1e9);
    for (int step = 0; step < 3; ++step, alpha /= 2) {
        auto q = poisson_integral_quadrature(f, 0.5, alpha);
        for (int s = 0; s < 5; ++s) {
            const double e = std::abs(q[samples[s]] - spectral[samples[s]]);
            EXPECT_LT(e, prev[s]);
            prev[s] = e;
        }
    }
    // Linear extrapolation in alpha at one point.
    const auto lim = abel_limit([&](double a) { return poisson_integral_quadrature(f, 0.5, a)[512]; },
                                AbelSchedule::geometric(4, 0.02));
    EXPECT_LT(std::abs(lim.value - spectral[512]), 1e-4);
}

TEST(InitialConditionSweep, Examples) {
    auto prop = wide(1024);
    auto f = gaussian_packet(prop, 1.0);
    const std::vector<double> times{0.1, 0.05, 0.025, 1e-3};
    const auto e = initial_condition_sweep(f, times);
    for (std::size_t k = 1; k < e.size(); ++k) EXPECT_LT(e[k], e[k - 1]);
    EXPECT_LT(e.back(), 0.01);
    WaveState zero(prop, std::vector<Complex>(1024));
    for (double v : initial_condition_sweep(zero, times)) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(initial_condition_sweep(f, std::vector<double>{0.1, 0.2}), InvalidParameter);
    EXPECT_THROW(initial_condition_sweep(f, std::vector<double>{-0.1}), InvalidParameter);
}

TEST(DysonKernel, BoundAndZeroPotential) {
    auto prop = wide(128);
    TimeGrid g(1.0, 8);
    EXPECT_DOUBLE_EQ(uniform_bound(build_dyson_kernel(PotentialSpec::constant(0.3), prop, g)), 0.3);
    EXPECT_DOUBLE_EQ(uniform_bound(build_dyson_kernel(PotentialSpec::lorentzian(0.5), prop, g)), 0.5);
    auto hbar2 = make_propagator(SpatialGrid(-20.0, 20.0, 128), PhysicalParams{2.0, 0.5});
    EXPECT_DOUBLE_EQ(uniform_bound(build_dyson_kernel(PotentialSpec::constant(0.3), hbar2, g)), 0.15);
    auto zero = build_dyson_kernel(PotentialSpec::zero(), prop, g);
    BanachElement v(zero.space());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = 1.0;
    EXPECT_EQ(norm(apply(zero, 0.7, 0.2, v)), 0.0);
}

TEST(DysonKernel, FastPathMatchesPerPairApplication) {
    auto prop = wide(128);
    TimeGrid g(1.0, 12);
    auto k = build_dyson_kernel(PotentialSpec::lorentzian(0.5), prop, g);
    auto f = free_trajectory(gaussian_packet(prop, 1.0, 0.5, 1.0), g);
    auto fast = apply_Q(k, f);
    for (std::size_t i = 0; i < g.n_nodes(); ++i) {
        BanachElement acc(k.space());
        for (std::size_t j = 0; j <= i; ++j) acc = axpy(g.trapezoid_weight(j, i), apply(k, g.node(i), g.node(j), f[j]), acc);
        EXPECT_LT(norm(axpy(-1.0, acc, fast[i])), 1e-14);
    }
}

TEST(DysonKernel, ConstantPotentialConvergesToPhase) {
    auto prop = wide(256);
    TimeGrid g(1.0, 1024);
    auto h = gaussian_packet(prop, 1.0);
    auto k = build_dyson_kernel(PotentialSpec::constant(0.3), prop, g);
    SolveSettings s;
    s.tol = 1e-12;
    s.max_terms = 12;
    auto r = neumann_solve(k, free_trajectory(h, g), s);
    auto ref = reference_solution(ConstantPotentialPhase{0.3, prop, {h.values().begin(), h.values().end()}}, g, k.space());
    EXPECT_LT(norm(axpy(-1.0, r.solution, ref)[1024]), 1e-8);
}

TEST(SourceIntegral, BoundedByUnitarity) {
    auto prop = wide(128);
    TimeGrid g(1.0, 32);
    auto src = Trajectory::sample(g, prop->grid().space(), [&](double t) {
        return gaussian_packet(prop, 1.0 + t, t, 1.0 - t).as_element(prop->grid().space());
    });
    auto phi = source_integral(src, prop);
    auto chk = check_source_bound(phi, src, 1.0);
    EXPECT_TRUE(chk.holds);
    EXPECT_EQ(chk.lhs[0], 0.0);
}
