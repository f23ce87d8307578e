#pragma once

// The Volterra operator (Q phi)(t) = int_0^t A(t, tau) phi(tau) dtau on a
// uniform grid and its Neumann (Picard) series phi = sum_n psi_n,
// psi_0 = f, psi_{n+1} = Q psi_n.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "volterra/bounds.hpp"
#include "volterra/errors.hpp"
#include "volterra/kernels.hpp"
#include "volterra/parallel.hpp"
#include "volterra/state_space.hpp"

namespace volterra {

struct SolveSettings {
    LpExponent p = LpExponent::infinity();
    double tol = 1e-10;
    std::size_t max_terms = 200;
    bool parallel = false;
    /// Keep every psi_n, not only its norm.
    bool keep_terms = false;

    void validate() const {
        if (!(tol > 0.0)) throw InvalidParameter("tol must be positive");
        if (max_terms < 1) throw InvalidParameter("max_terms must be >= 1");
    }
};

struct NeumannReport {
    LpExponent p = LpExponent::infinity();
    double D = 0.0;                  ///< uniform kernel bound used by the majorants
    double base_norm = 0.0;          ///< ||psi_0||_{L^p(I;B)}
    std::vector<double> term_norms;  ///< ||psi_n||_{L^p(I;B)}
    std::vector<double> majorants;   ///< theorem bound for each term
    std::vector<double> quad_slack;  ///< relative slack allowed on each majorant
    std::vector<double> ratios;      ///< term_norms[n+1] / term_norms[n]
    double certified_tail = 0.0;
    double residual = 0.0;
    std::size_t terms_used = 0;
    bool converged = false;

    /// term_norms[n] <= majorants[n] (1 + quad_slack[n]) for every n.
    bool majorants_hold() const {
        for (std::size_t n = 0; n < term_norms.size(); ++n)
            if (!(term_norms[n] <= majorants[n] * (1.0 + quad_slack[n]))) return false;
        return true;
    }
};

struct NeumannResult {
    Trajectory solution;
    NeumannReport report;
    std::vector<Trajectory> terms;  ///< filled only with SolveSettings::keep_terms
};

namespace detail {

inline void check_operands(const KernelSpec& k, const Trajectory& phi, const char* where) {
    if (!phi.space()->same_as(*k.space())) throw StructuralError(std::string(where) + ": trajectory is not in the kernel's space");
    if (!k.in_domain(phi.grid().horizon()))
        throw InvalidParameter(std::string(where) + ": trajectory extends beyond the kernel's time horizon");
}

/// Dyson kernel: transform V(tau_j) phi_j once per node, accumulate
/// sum_j w_ij e^{-i beta k^2 (t_i - tau_j)} g_hat_j in Fourier space, then one
/// inverse transform per target node.
inline Trajectory apply_dyson(const DysonSchrodinger& dyson, const Trajectory& phi, bool parallel) {
    const auto& prop = *dyson.propagator;
    const auto& sg = prop.grid();
    const TimeGrid& grid = phi.grid();
    const std::size_t nodes = grid.n_nodes();
    const std::size_t m = sg.size();

    std::vector<std::vector<Complex>> spectra(nodes, std::vector<Complex>(m));
    parallel_for(0, nodes, parallel, [&](std::size_t j) {
        std::vector<Complex> g(m);
        const double tau = grid.node(j);
        const auto v = phi[j].coords();
        for (std::size_t x = 0; x < m; ++x) g[x] = dyson.potential(sg.x(x), tau) * v[x];
        prop.forward(g, spectra[j]);
    });

    // Phase by lag (i - j) h.
    const double h = grid.step();
    std::vector<Complex> phase(nodes * m);
    for (std::size_t lag = 0; lag < nodes; ++lag)
        for (std::size_t q = 0; q < m; ++q) phase[lag * m + q] = prop.phase(q, static_cast<double>(lag) * h);

    const Complex factor(0.0, -1.0 / prop.params().hbar);
    Trajectory out(grid, phi.space());
    parallel_for(1, nodes, parallel, [&](std::size_t i) {
        std::vector<Complex> acc(m);
        for (std::size_t j = 0; j <= i; ++j) {
            const double w = grid.trapezoid_weight(j, i);
            const Complex* ph = phase.data() + (i - j) * m;
            const Complex* s = spectra[j].data();
            for (std::size_t q = 0; q < m; ++q) acc[q] += w * ph[q] * s[q];
        }
        auto dst = out[i].coords();
        prop.inverse(acc, dst);
        for (auto& z : dst) z *= factor;
    });
    return out;
}

} // namespace detail

/// (Q phi)(t_i) = sum_{j <= i} w_ij A(t_i, tau_j) phi(tau_j) with composite
/// trapezoid weights; (Q phi)(t_0) = 0. Each target node sums in ascending j,
/// so serial and parallel runs agree bit for bit.
inline Trajectory apply_Q(const KernelSpec& k, const Trajectory& phi, bool parallel = false) {
    detail::check_operands(k, phi, "apply_Q");
    if (const auto* dyson = k.as_dyson()) return detail::apply_dyson(*dyson, phi, parallel);

    const TimeGrid& grid = phi.grid();
    Trajectory out(grid, phi.space());
    parallel_for(1, grid.n_nodes(), parallel, [&](std::size_t i) {
        const double t = grid.node(i);
        auto acc = out[i].coords();
        for (std::size_t j = 0; j <= i; ++j)
            k.accumulate_raw(t, grid.node(j), Complex{grid.trapezoid_weight(j, i)}, phi[j].coords(), acc);
    });
    return out;
}

/// ||phi - Q phi - f||_{L^inf(I;B)}.
inline double residual(const KernelSpec& k, const Trajectory& phi, const Trajectory& f, bool parallel = false) {
    require_compatible(phi, f, "residual");
    const Trajectory q = apply_Q(k, phi, parallel);
    double worst = 0.0;
    BanachElement diff(phi.space());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        auto d = diff.coords();
        auto a = phi[i].coords();
        auto b = q[i].coords();
        auto c = f[i].coords();
        for (std::size_t x = 0; x < d.size(); ++x) d[x] = a[x] - b[x] - c[x];
        worst = std::max(worst, norm(diff));
    }
    return worst;
}

/// Certified bound on sum_{k > n} ||psi_k|| from the majorant series.
inline double certified_tail(std::size_t n, double D, double horizon, LpExponent p, double base, double tol) {
    if (p.is_endpoint()) return exp_tail(n, D, horizon, base);
    return lp_series_tail(n, D, horizon, p, base, tol * 1e-3);
}

/// Partial sums S_N = sum_{n<=N} psi_n until the certified tail drops below
/// tol or max_terms terms have been summed. Hitting max_terms first is
/// reported through report.converged = false, not an exception.
inline NeumannResult neumann_solve(const KernelSpec& k, const Trajectory& f, const SolveSettings& s) {
    s.validate();
    detail::check_operands(k, f, "neumann_solve");
    const TimeGrid& grid = f.grid();
    const double horizon = grid.horizon();

    NeumannReport rep;
    rep.p = s.p;
    rep.D = uniform_bound(k);
    rep.base_norm = lp_time_norm(f, s.p);
    const auto overshoot = trapezoid_simplex_overshoot(grid, s.max_terms);

    auto record = [&](std::size_t n, double term_norm) {
        rep.term_norms.push_back(term_norm);
        rep.majorants.push_back(theorem_term_bound({static_cast<double>(n), rep.D, horizon, s.p, rep.base_norm}));
        rep.quad_slack.push_back(quad_slack(grid, rep.D, rep.base_norm, overshoot[n]));
    };

    NeumannResult result{f, {}, {}};
    if (s.keep_terms) result.terms.push_back(f);
    Trajectory psi = f;
    record(0, rep.base_norm);

    std::size_t n = 0;
    for (;;) {
        rep.certified_tail = certified_tail(n, rep.D, horizon, s.p, rep.base_norm, s.tol);
        if (rep.certified_tail < s.tol) {
            rep.converged = true;
            break;
        }
        if (n + 1 >= s.max_terms) break;
        psi = apply_Q(k, psi, s.parallel);
        ++n;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            auto dst = result.solution[i].coords();
            auto src = psi[i].coords();
            for (std::size_t x = 0; x < dst.size(); ++x) dst[x] += src[x];
        }
        record(n, lp_time_norm(psi, s.p));
        if (s.keep_terms) result.terms.push_back(psi);
    }
    rep.terms_used = n + 1;
    rep.ratios = empirical_ratio(rep.term_norms);
    rep.residual = residual(k, result.solution, f, s.parallel);
    result.report = std::move(rep);
    return result;
}

} // namespace volterra
