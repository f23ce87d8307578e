#include <gtest/gtest.h>

#include <cmath>

#include "volterra/kernels.hpp"
#include "volterra/matrix.hpp"
#include "volterra/random.hpp"

using namespace volterra;

namespace {
const TimeGrid kGrid(1.0, 16);
}

TEST(Apply, ScalarConstantMultiplies) {
    auto k = scalar_constant_kernel(2.0, kGrid);
    auto v = apply(k, 0.5, 0.25, BanachElement(k.space(), {3.0}));
    EXPECT_EQ(v[0], Complex(6.0));
}

TEST(Apply, UpperTriangleIsZeroForEveryVariant) {
    CounterRng rng(3);
    std::vector<KernelSpec> kernels{scalar_constant_kernel(2.0, kGrid),
                                    scalar_smooth_kernel(random_trig_mix(rng, 1.0), kGrid),
                                    random_hilbert_schmidt_kernel(4, 2.0, kGrid, CounterRng(5), 0.5)};
    DenseMatrix b(2, 2, {1.0, 2.0, 3.0, 4.0});
    auto s2 = make_space(2, PNorm{2.0});
    kernels.emplace_back(MatrixSeparable{b, ScalarFunction("cosine", {1.0, 2.0})}, s2, kGrid);
    auto prop = make_propagator(SpatialGrid(-5.0, 5.0, 16));
    kernels.emplace_back(DysonSchrodinger{PotentialSpec::constant(0.5), prop}, prop->grid().space(), kGrid, 0.5);
    for (const auto& k : kernels) {
        BanachElement v(k.space());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = Complex(1.0 + i, -0.5);
        EXPECT_EQ(norm(apply(k, 0.25, 0.5, v)), 0.0);
        EXPECT_EQ(norm(apply(k.with_upper_probe(1e9), 0.25, 0.5, v)), 0.0);
    }
}

TEST(Apply, RejectsWrongSpaceAndTimes) {
    auto k = scalar_constant_kernel(2.0, kGrid);
    EXPECT_THROW(apply(k, 0.5, 0.2, BanachElement(make_space(2, SupNorm{}))), StructuralError);
    EXPECT_THROW(apply(k, 1.5, 0.2, BanachElement(k.space())), InvalidParameter);
    EXPECT_THROW(apply(k, 0.5, -0.2, BanachElement(k.space())), InvalidParameter);
}

TEST(Apply, DysonDiagonalIsMultiplication) {
    auto prop = make_propagator(SpatialGrid(-5.0, 5.0, 32));
    KernelSpec k(DysonSchrodinger{PotentialSpec::constant(0.7), prop}, prop->grid().space(), kGrid, 0.7);
    BanachElement v(k.space());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = Complex(std::cos(0.3 * i), std::sin(0.1 * i));
    auto out = apply(k, 0.5, 0.5, v);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(std::abs(out[i] - Complex(0, -0.7) * v[i]), 0.0, 1e-15);
}

TEST(UniformBound, Examples) {
    EXPECT_DOUBLE_EQ(uniform_bound(scalar_constant_kernel(-3.0, kGrid)), 3.0);
    auto prop = make_propagator(SpatialGrid(-5.0, 5.0, 16));
    KernelSpec d(DysonSchrodinger{PotentialSpec::lorentzian(0.4), prop}, prop->grid().space(), kGrid);
    EXPECT_DOUBLE_EQ(uniform_bound(d), 0.4);
    // B = diag(5, 1) rotated has 2-norm 5; sup |g| = 2.
    const double c = std::cos(0.3), s = std::sin(0.3);
    DenseMatrix r(2, 2, {c, -s, s, c});
    DenseMatrix b(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) b(i, j) = 5.0 * r(i, 0) * r(j, 0) + 1.0 * r(i, 1) * r(j, 1);
    KernelSpec m(MatrixSeparable{b, ScalarFunction("constant", {2.0, 0.0})}, make_space(2, PNorm{2.0}), kGrid);
    EXPECT_NEAR(uniform_bound(m), 10.0, 1e-12);
    EXPECT_DOUBLE_EQ(uniform_bound(m.with_declared_bound(42.0)), 42.0);
}

TEST(SpectralNorm, MatchesUnitVectorSampling) {
    CounterRng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        DenseMatrix b(3, 3);
        for (auto& z : b.data()) z = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const double sigma = spectral_norm(b);
        double sampled = 0.0;
        for (int k = 0; k < 20000; ++k) {
            std::vector<Complex> v(3);
            double n2 = 0.0;
            for (auto& z : v) {
                z = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
                n2 += std::norm(z);
            }
            const auto bv = b * v;
            double m2 = 0.0;
            for (auto z : bv) m2 += std::norm(z);
            sampled = std::max(sampled, std::sqrt(m2 / n2));
        }
        EXPECT_LE(sampled, sigma * (1 + 1e-12));
        EXPECT_GT(sampled, sigma * 0.97);
    }
}

TEST(UniformBound, ApplyRespectsBoundOnSamples) {
    CounterRng rng(21);
    auto hs = random_hilbert_schmidt_kernel(5, 3.0, kGrid, CounterRng(4), 0.2);
    auto smooth = scalar_smooth_kernel(random_trig_mix(rng, 2.0), kGrid);
    auto prop = make_propagator(SpatialGrid(-10.0, 10.0, 64));
    KernelSpec dyson(DysonSchrodinger{PotentialSpec::lorentzian(0.5), prop}, prop->grid().space(), kGrid, 0.5);
    for (const KernelSpec* k : {&hs, &smooth, &dyson}) {
        const double D = uniform_bound(*k);
        for (int trial = 0; trial < 50; ++trial) {
            BanachElement v(k->space());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
            // The bound is a maximum over grid nodes, so sample there.
            const auto i = static_cast<std::size_t>(rng.uniform(0.0, 16.999));
            const auto j = static_cast<std::size_t>(rng.uniform(0.0, i + 0.999));
            const double t = kGrid.node(i), tau = kGrid.node(j);
            EXPECT_LE(norm(apply(*k, t, tau, v)), D * norm(v) * (1 + 1e-10));
        }
    }
}

TEST(UniformBound, DysonConstantPotentialAttainsBound) {
    auto prop = make_propagator(SpatialGrid(-10.0, 10.0, 64));
    KernelSpec k(DysonSchrodinger{PotentialSpec::constant(0.3), prop}, prop->grid().space(), kGrid, 0.3);
    BanachElement v(k.space());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-0.1 * (prop->grid().x(i) * prop->grid().x(i)));
    const double scale = 1.0 / norm(v);
    for (auto& z : v.coords()) z *= scale;
    EXPECT_NEAR(norm(apply(k, 0.8, 0.1, v)), 0.3, 1e-13);
}

TEST(Kernels, HilbertSchmidtNeedsGridL2Space) {
    auto hs = random_hilbert_schmidt_kernel(3, 1.0, kGrid, CounterRng(1), 0.5);
    const auto* v = std::get_if<HilbertSchmidtGrid>(&hs.variant());
    ASSERT_NE(v, nullptr);
    EXPECT_THROW(KernelSpec(*v, make_space(3, SupNorm{}), kGrid), StructuralError);
    EXPECT_NEAR(uniform_bound(hs), 1.0, 1e-12);
}

TEST(Kernels, MutatingUpperSamplesKeepsLowerTriangle) {
    auto hs = random_hilbert_schmidt_kernel(3, 1.0, kGrid, CounterRng(1), 0.5);
    auto m = mutate_upper_samples(hs, 1e6);
    BanachElement v(hs.space(), {1.0, 2.0, 3.0});
    EXPECT_EQ(apply(hs, 0.5, 0.25, v), apply(m, 0.5, 0.25, v));
}

TEST(Potential, UnknownAndWrongArity) {
    EXPECT_THROW(PotentialSpec("bogus", {}), InvalidParameter);
    EXPECT_THROW(PotentialSpec("constant", {}), InvalidParameter);
    EXPECT_THROW(ScalarFunction("cosine", {1.0}), InvalidParameter);
}

TEST(PhysicalParams, Derived) {
    PhysicalParams p;
    EXPECT_DOUBLE_EQ(p.a_squared(), 1.0);
    PhysicalParams bad{1.0, -1.0};
    EXPECT_THROW(bad.validate(), InvalidParameter);
}
