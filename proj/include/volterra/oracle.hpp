#pragma once

// Reference solutions that do not go through the Picard iteration: forward
// substitution on the same trapezoid discretization, and closed forms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/kernels.hpp"
#include "volterra/propagator.hpp"
#include "volterra/schrodinger.hpp"
#include "volterra/state_space.hpp"

namespace volterra {

/// Solves phi_i - sum_{j <= i} w_ij A(t_i, t_j) phi_j = f_i node by node.
/// The diagonal block (Id - (h/2) A(t_i, t_i)) is inverted exactly for scalar
/// kernels and by its Neumann expansion otherwise.
inline Trajectory collocation_solve(const KernelSpec& k, const Trajectory& f) {
    if (!f.space()->same_as(*k.space())) throw StructuralError("collocation_solve: trajectory is not in the kernel's space");
    if (!k.in_domain(f.grid().horizon())) throw InvalidParameter("collocation_solve: trajectory extends beyond the kernel's horizon");
    const TimeGrid& grid = f.grid();
    const double h = grid.step();
    const double D = uniform_bound(k);
    if (!(0.5 * h * D < 1.0))
        throw PreconditionError("collocation_solve: h * D / 2 = " + std::to_string(0.5 * h * D) + " >= 1; reduce h");

    const auto& v = k.variant();
    const bool scalar = std::holds_alternative<ScalarConstant>(v) || std::holds_alternative<ScalarSmooth>(v);
    const std::size_t dim = k.space()->dim();

    Trajectory phi(grid, f.space());
    phi[0] = f[0];
    std::vector<Complex> rhs(dim), term(dim), next(dim);
    for (std::size_t i = 1; i < grid.n_nodes(); ++i) {
        const double t = grid.node(i);
        auto f_i = f[i].coords();
        std::copy(f_i.begin(), f_i.end(), rhs.begin());
        for (std::size_t j = 0; j < i; ++j)
            k.accumulate_raw(t, grid.node(j), Complex{grid.trapezoid_weight(j, i)}, phi[j].coords(), rhs);

        auto out = phi[i].coords();
        const Complex half_h{0.5 * h};
        if (scalar) {
            // A(t, t) = a Id: read a off a unit vector.
            std::vector<Complex> e(dim), a(dim);
            e[0] = 1.0;
            k.accumulate_raw(t, t, Complex{1.0}, e, a);
            const Complex denom = 1.0 - half_h * a[0];
            for (std::size_t x = 0; x < dim; ++x) out[x] = rhs[x] / denom;
            continue;
        }
        // x = sum_m ((h/2) A(t, t))^m rhs
        std::copy(rhs.begin(), rhs.end(), term.begin());
        std::copy(rhs.begin(), rhs.end(), out.begin());
        const NormKind& kind = k.space()->norm_kind();
        for (int m = 0; m < 2000; ++m) {
            std::fill(next.begin(), next.end(), Complex{});
            k.accumulate_raw(t, t, half_h, term, next);
            const double tn = norm_of(next, kind);
            for (std::size_t x = 0; x < dim; ++x) out[x] += next[x];
            term.swap(next);
            if (tn == 0.0 || tn <= 1e-17 * norm_of(out, kind)) break;
        }
    }
    return phi;
}

struct ResolventExponential {
    Complex lambda{1.0};
};

/// u(t) = e^{-i V0 t / hbar} U_f(t) h.
struct ConstantPotentialPhase {
    double v0 = 0.0;
    PropagatorPtr propagator;
    std::vector<Complex> initial;
};

/// Free evolution of (pi sigma^2)^{-1/4} exp(-(x - x0)^2 / (2 sigma^2) + i k0 x).
struct GaussianFreeEvolution {
    double sigma = 1.0;
    double x0 = 0.0;
    double k0 = 0.0;
    PropagatorPtr propagator;
};

using ReferenceCase = std::variant<ResolventExponential, ConstantPotentialPhase, GaussianFreeEvolution>;

/// Closed-form dispersive Gaussian at time t, evaluated on the propagator's
/// grid. With s = sigma^2 / 2 and c = i beta (beta = a^2 / hbar), the heat
/// semigroup e^{c t d^2} acting on e^{i k0 x} g(x) shifts and widens g:
///   u = N e^{i k0 x - c t k0^2} sqrt(s / (s + c t)) exp(-(x - x0 + 2 i c t k0)^2 / (4 (s + c t))).
inline std::vector<Complex> gaussian_closed_form(const GaussianFreeEvolution& g, double t) {
    if (!(g.sigma > 0.0)) throw InvalidParameter("Gaussian width sigma must be positive");
    if (!g.propagator) throw InvalidParameter("Gaussian reference needs a propagator");
    const auto& grid = g.propagator->grid();
    const double beta = g.propagator->params().dispersion();
    const double amp = std::pow(std::numbers::pi * g.sigma * g.sigma, -0.25);
    const double s = 0.5 * g.sigma * g.sigma;
    const Complex ct(0.0, beta * t);
    const Complex width = s + ct;
    const Complex pref = amp * std::sqrt(s / width) * std::exp(-ct * g.k0 * g.k0);
    const Complex shift = 2.0 * Complex(0.0, 1.0) * ct * g.k0;
    std::vector<Complex> out(grid.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double x = grid.x(j);
        const Complex d = x - g.x0 + shift;
        out[j] = pref * std::exp(Complex(0.0, g.k0 * x) - d * d / (4.0 * width));
    }
    return out;
}

inline Trajectory reference_solution(const ReferenceCase& c, const TimeGrid& grid, const SpacePtr& space) {
    return std::visit(
        [&](const auto& rc) -> Trajectory {
            using C = std::decay_t<decltype(rc)>;
            if constexpr (std::is_same_v<C, ResolventExponential>) {
                if (space->dim() != 1) throw InvalidParameter("resolvent reference is scalar");
                return Trajectory::sample(grid, space, [&](double t) {
                    return BanachElement(space, {std::exp(rc.lambda * t)});
                });
            } else if constexpr (std::is_same_v<C, ConstantPotentialPhase>) {
                if (!rc.propagator) throw InvalidParameter("constant-potential reference needs a propagator");
                if (rc.initial.size() != space->dim()) throw InvalidParameter("initial data does not match the space");
                const double hbar = rc.propagator->params().hbar;
                return Trajectory::sample(grid, space, [&](double t) {
                    std::vector<Complex> u(rc.initial.size());
                    rc.propagator->evolve(rc.initial, t, u);
                    const Complex phase = std::exp(Complex(0.0, -rc.v0 * t / hbar));
                    for (auto& z : u) z *= phase;
                    return BanachElement(space, std::move(u));
                });
            } else {
                if (!rc.propagator || rc.propagator->grid().size() != space->dim())
                    throw InvalidParameter("Gaussian reference grid does not match the space");
                return Trajectory::sample(grid, space, [&](double t) { return BanachElement(space, gaussian_closed_form(rc, t)); });
            }
        },
        c);
}

} // namespace volterra
