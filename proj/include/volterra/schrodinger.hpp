#pragma once

// Free Schrodinger evolution, the Abel-regularized Poisson integral, and the
// Dyson kernel that moves a bounded potential to the source side.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/kernels.hpp"
#include "volterra/picard.hpp"
#include "volterra/propagator.hpp"
#include "volterra/state_space.hpp"

namespace volterra {

/// Wave function sampled on a spatial grid; grid and physical parameters
/// come from the propagator it is bound to.
class WaveState {
public:
    WaveState(PropagatorPtr propagator, std::vector<Complex> values)
        : propagator_(std::move(propagator)), values_(std::move(values)) {
        if (!propagator_) throw StructuralError("wave state needs a propagator");
        if (values_.size() != propagator_->grid().size()) throw StructuralError("wave state size does not match its grid");
    }

    const PropagatorPtr& propagator() const { return propagator_; }
    const SpatialGrid& grid() const { return propagator_->grid(); }
    const PhysicalParams& params() const { return propagator_->params(); }
    std::span<const Complex> values() const { return values_; }
    std::span<Complex> values() { return values_; }
    Complex operator[](std::size_t j) const { return values_[j]; }

    /// Discrete L2 norm with cell weight dx.
    double l2_norm() const { return norm_of(values_, GridL2Norm{grid().dx()}); }

    BanachElement as_element(const SpacePtr& space) const { return BanachElement(space, values_); }

private:
    PropagatorPtr propagator_;
    std::vector<Complex> values_;
};

/// (pi sigma^2)^{-1/4} exp(-(x - x0)^2 / (2 sigma^2) + i k0 x): unit L2 norm
/// on the line.
inline WaveState gaussian_packet(const PropagatorPtr& prop, double sigma, double x0 = 0.0, double k0 = 0.0) {
    if (!(sigma > 0.0)) throw InvalidParameter("Gaussian width sigma must be positive");
    const auto& g = prop->grid();
    const double amp = std::pow(std::numbers::pi * sigma * sigma, -0.25);
    std::vector<Complex> v(g.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double d = g.x(j) - x0;
        v[j] = amp * std::exp(Complex(-d * d / (2.0 * sigma * sigma), k0 * g.x(j)));
    }
    return WaveState(prop, std::move(v));
}

/// K_f(x, y, t) = (m / (2 pi hbar i t))^{n/2} exp(i m |x - y|^2 / (2 hbar t)),
/// principal branch. t = 0 is the delta distribution and is rejected.
inline Complex free_kernel(double x, double y, double t, const PhysicalParams& params, int n_dim = 1) {
    params.validate();
    if (t == 0.0) throw InvalidParameter("free_kernel: t = 0 is the delta distribution, not a function value");
    if (n_dim < 1) throw InvalidParameter("free_kernel: dimension must be >= 1");
    const double m = params.mass, hbar = params.hbar;
    const Complex base(0.0, -m / (2.0 * std::numbers::pi * hbar * t));  // m / (2 pi hbar i t)
    const Complex prefactor = std::exp(0.5 * static_cast<double>(n_dim) * std::log(base));
    const double r2 = (x - y) * (x - y);
    return prefactor * std::exp(Complex(0.0, m * r2 / (2.0 * hbar * t)));
}

/// Spectral evolution U_f(t) psi. Negative t runs backwards.
inline WaveState free_evolve(const WaveState& psi, double t) {
    std::vector<Complex> out(psi.values().size());
    psi.propagator()->evolve(psi.values(), t, out);
    return WaveState(psi.propagator(), std::move(out));
}

/// Direct quadrature of int K_f(x - y, t) e^{-alpha |x - y|^2 / |gamma^2|} f(y) dy
/// with gamma^2 = 2 hbar t / m, on the (non-periodic) grid.
inline WaveState poisson_integral_quadrature(const WaveState& f, double t, double alpha) {
    if (t == 0.0) throw InvalidParameter("poisson_integral_quadrature: t must be nonzero");
    if (!(alpha > 0.0)) throw InvalidParameter("poisson_integral_quadrature: alpha must be positive");
    const auto& g = f.grid();
    const auto& params = f.params();
    const double gamma2 = 2.0 * params.hbar * std::abs(t) / params.mass;
    const std::size_t n = g.size();
    const double dx = g.dx();
    // Kernel depends on x - y only; tabulate by index offset.
    std::vector<Complex> table(2 * n - 1);
    for (std::size_t d = 0; d < table.size(); ++d) {
        const double r = (static_cast<double>(d) - static_cast<double>(n - 1)) * dx;
        table[d] = free_kernel(r, 0.0, t, params) * std::exp(-alpha * r * r / gamma2) * dx;
    }
    std::vector<Complex> out(n);
    const auto src = f.values();
    for (std::size_t i = 0; i < n; ++i) {
        Complex s{};
        for (std::size_t j = 0; j < n; ++j) s += table[i + (n - 1) - j] * src[j];
        out[i] = s;
    }
    return WaveState(f.propagator(), std::move(out));
}

/// sup over the central three quarters of the grid of |U_f(t) f - f|, for
/// each t of a positive, strictly decreasing sequence.
inline std::vector<double> initial_condition_sweep(const WaveState& f, std::span<const double> times) {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] > 0.0)) throw InvalidParameter("initial_condition_sweep: times must be positive");
        if (k > 0 && !(times[k] < times[k - 1])) throw InvalidParameter("initial_condition_sweep: times must decrease");
    }
    const std::size_t n = f.grid().size();
    const std::size_t lo = n / 8, hi = n - n / 8;
    std::vector<double> errors;
    errors.reserve(times.size());
    for (double t : times) {
        const WaveState u = free_evolve(f, t);
        double m = 0.0;
        for (std::size_t j = lo; j < hi; ++j) m = std::max(m, std::abs(u[j] - f[j]));
        errors.push_back(m);
    }
    return errors;
}

/// Dyson kernel A(t, tau) = -(i / hbar) U_f(t - tau) V(tau) with declared
/// bound C / hbar. V is sampled on the spatial grid at every time node to
/// confirm |V| <= C.
inline KernelSpec build_dyson_kernel(const PotentialSpec& potential, const PropagatorPtr& prop, const TimeGrid& time_grid) {
    const auto& g = prop->grid();
    const double c = potential.sup_bound();
    for (std::size_t i = 0; i < time_grid.n_nodes(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            if (std::abs(potential(g.x(j), time_grid.node(i))) > c * (1.0 + 1e-12))
                throw InvalidParameter("potential exceeds its declared sup bound on the grid");
    return KernelSpec(DysonSchrodinger{potential, prop}, g.space(), time_grid, c / prop->params().hbar);
}

/// f(t_i) = U_f(t_i) h, the free evolution of initial data h.
inline Trajectory free_trajectory(const WaveState& initial, const TimeGrid& time_grid) {
    const SpacePtr space = initial.grid().space();
    return Trajectory::sample(time_grid, space, [&](double t) { return free_evolve(initial, t).as_element(space); });
}

/// Phi(t) = -(i / hbar) int_0^t U_f(t - tau) F(tau) dtau for a sampled source F.
inline Trajectory source_integral(const Trajectory& source, const PropagatorPtr& prop) {
    const KernelSpec unit = build_dyson_kernel(PotentialSpec::constant(1.0), prop, source.grid());
    return apply_Q(unit, source);
}

struct SourceBoundCheck {
    std::vector<double> lhs;  ///< ||U_f(t) u(0) - u(t)||, or ||Phi(t)||
    std::vector<double> rhs;  ///< hbar^{-1} t sup_{tau <= t} ||F(tau)||
    bool holds = true;
};

/// Compares ||deviation(t_i)|| against hbar^{-1} t_i sup_{tau <= t_i} ||F(tau)||
/// at every node, allowing only rounding-level excess.
inline SourceBoundCheck check_source_bound(const Trajectory& deviation, const Trajectory& source, double hbar) {
    require_compatible(deviation, source, "check_source_bound");
    SourceBoundCheck out;
    const auto f_norms = source.pointwise_norms();
    double running_sup = 0.0;
    for (std::size_t i = 0; i < deviation.size(); ++i) {
        running_sup = std::max(running_sup, f_norms[i]);
        const double lhs = norm(deviation[i]);
        const double rhs = deviation.grid().node(i) * running_sup / hbar;
        out.lhs.push_back(lhs);
        out.rhs.push_back(rhs);
        if (!(lhs <= rhs * (1.0 + 1e-12) + 1e-15)) out.holds = false;
    }
    return out;
}

/// Theorem-2 style check for a solved u: deviation U_f(t) u(0) - u(t) against
/// the source F = V u.
inline SourceBoundCheck potential_source_bound(const Trajectory& u, const Trajectory& free_solution,
                                               const PotentialSpec& potential, const PropagatorPtr& prop) {
    require_compatible(u, free_solution, "potential_source_bound");
    const auto& g = prop->grid();
    Trajectory source(u.grid(), u.space());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double t = u.grid().node(i);
        auto dst = source[i].coords();
        auto src = u[i].coords();
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = potential(g.x(j), t) * src[j];
    }
    return check_source_bound(axpy(Complex{-1.0}, u, free_solution), source, prop->params().hbar);
}

} // namespace volterra
