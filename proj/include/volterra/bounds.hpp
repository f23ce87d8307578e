#pragma once

// Closed-form majorants for Volterra operators with uniformly bounded kernels.
//
// For ||A(t, tau)|| <= D and ||phi||_{L^p(0,t)} <= C t^n (sup for p = inf,
// integral for p = 1), one application of the Volterra operator satisfies
//
//   ||Q phi|| <= D C t^{n+1} / (n+1)                    p in {1, inf}
//   ||Q phi|| <= C D t^{n+1} / [p (n+1)]^{1/p}          1 < p < inf
//
// and induction from psi_0 gives the term bounds
//
//   ||psi_n|| <= D^n ||psi_0|| t^n / n!                          p in {1, inf}
//   ||psi_n|| <= (D^n / p^{n/p}) ||psi_0|| t^n / (n!)^{1/p}      1 < p < inf

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/state_space.hpp"

namespace volterra {

struct MajorantQuery {
    double n = 0.0;  ///< term index, or real lemma exponent
    double D = 0.0;
    double t = 0.0;
    LpExponent p = LpExponent::infinity();
    double base_norm = 0.0;  ///< ||psi_0||, or C in the lemmas

    void validate() const {
        if (!(n >= 0.0) || !(D >= 0.0) || !(t >= 0.0) || !(base_norm >= 0.0))
            throw InvalidParameter("majorant query fields must be nonnegative");
    }
};

/// M(p) = D / p^{1/p}; M(inf) = M(1) = D.
inline double majorant_rate(double D, LpExponent p) {
    if (p.is_endpoint()) return D;
    return D / std::pow(p.value(), 1.0 / p.value());
}

/// Single-application bound ||Q phi|| given ||phi||_{L^p(0,t)} <= C t^n.
inline double lemma_bound(const MajorantQuery& q) {
    q.validate();
    if (q.D == 0.0 || q.base_norm == 0.0) return 0.0;
    const double n1 = q.n + 1.0;
    const double tp = std::pow(q.t, n1);
    if (q.p.is_endpoint()) return q.D * q.base_norm * tp / n1;
    return q.base_norm * q.D * tp / std::pow(q.p.value() * n1, 1.0 / q.p.value());
}

/// Bound on the n-th Neumann term. n is rounded to the nearest integer.
/// Logarithms take over above n = 150 so that n! and D^n never overflow.
inline double theorem_term_bound(const MajorantQuery& q) {
    q.validate();
    const double n = std::round(q.n);
    if (n == 0.0) return q.base_norm;
    if (q.D == 0.0 || q.t == 0.0 || q.base_norm == 0.0) return 0.0;
    const double inv_p = q.p.is_endpoint() ? 1.0 : 1.0 / q.p.value();
    const double log_p_factor = q.p.is_endpoint() ? 0.0 : n * inv_p * std::log(q.p.value());
    if (n > 150.0) {
        const double log_value =
            n * std::log(q.D) + std::log(q.base_norm) + n * std::log(q.t) - log_p_factor - inv_p * std::lgamma(n + 1.0);
        return std::exp(log_value);
    }
    double value = q.base_norm;
    for (int k = 1; k <= static_cast<int>(n); ++k) value *= q.D * q.t / std::pow(static_cast<double>(k), inv_p);
    if (!q.p.is_endpoint()) value /= std::exp(log_p_factor);
    return value;
}

namespace detail {

/// term(n+1) + term(n+2) + ..., given the first term and ratio(k) =
/// term(k+1) / term(k), which must be nonincreasing in k.
template <class Term, class Ratio>
double remainder_series(std::size_t n, Term&& first, Ratio&& ratio, double stop_below) {
    double term = first;
    if (term == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t k = n + 1; k < n + 100000; ++k) {
        sum += term;
        const double r = ratio(k);
        const double next = term * r;
        if (r < 0.5 && (next < stop_below || next < sum * 1e-17)) {
            // Remaining terms shrink at least geometrically with ratio <= r.
            return sum + next / (1.0 - r);
        }
        term = next;
    }
    return sum;
}

} // namespace detail

/// base * (e^{Dt} - sum_{k<=n} (Dt)^k / k!), summed as the remainder series
/// itself so no cancellation occurs.
inline double exp_tail(std::size_t n, double D, double t, double base) {
    if (!(D >= 0.0) || !(t >= 0.0) || !(base >= 0.0)) throw InvalidParameter("exp_tail needs nonnegative D, t, base");
    const double x = D * t;
    if (x == 0.0 || base == 0.0) return 0.0;
    const double k1 = static_cast<double>(n + 1);
    const double first = std::exp(k1 * std::log(x) - std::lgamma(k1 + 1.0));
    return base * detail::remainder_series(n, first, [x](std::size_t k) { return x / static_cast<double>(k + 1); }, 0.0);
}

/// base * sum_{k > n} (Dt)^k / (p^{k/p} (k!)^{1/p}), the tail of the L^p
/// majorant series, summed until terms fall below stop_below and are
/// decreasing geometrically; the geometric remainder is included.
inline double lp_series_tail(std::size_t n, double D, double t, LpExponent p, double base, double stop_below = 0.0) {
    if (p.is_endpoint()) return exp_tail(n, D, t, base);
    const double x = majorant_rate(D, p) * t;
    if (x == 0.0 || base == 0.0) return 0.0;
    const double inv_p = 1.0 / p.value();
    const double k1 = static_cast<double>(n + 1);
    const double first = std::exp(k1 * std::log(x) - inv_p * std::lgamma(k1 + 1.0));
    return base * detail::remainder_series(
                      n, first, [x, inv_p](std::size_t k) { return x / std::pow(static_cast<double>(k + 1), inv_p); },
                      stop_below / base);
}

/// Ratios a_{n+1} / a_n, truncated before the first a_n = 0.
inline std::vector<double> empirical_ratio(std::span<const double> terms) {
    std::vector<double> out;
    for (std::size_t n = 0; n + 1 < terms.size(); ++n) {
        if (terms[n] < 0.0 || terms[n + 1] < 0.0) throw InvalidParameter("empirical_ratio needs nonnegative terms");
        if (terms[n] == 0.0) break;
        out.push_back(terms[n + 1] / terms[n]);
    }
    return out;
}

/// Relative excess of the trapezoid simplex volume over T^n / n!, n = 0..n_max.
///
/// The discrete operator (Q_h v)_i = sum_j w_ij v_j with trapezoid weights,
/// iterated n times on the constant 1, majorizes every discrete Neumann term
/// of a kernel bounded by 1. Its value at T exceeds the continuum simplex
/// volume T^n / n! by a factor 1 + overshoot[n], with
/// overshoot[n] ~ n (n-1) (n-2) / (12 N^2).
inline std::vector<double> trapezoid_simplex_overshoot(const TimeGrid& grid, std::size_t n_max) {
    const std::size_t nodes = grid.n_nodes();
    const double h = grid.step();
    const double horizon = grid.horizon();
    // u holds v_n * n! / T^n so that it stays O(1).
    std::vector<double> u(nodes, 1.0), next(nodes);
    std::vector<double> out{0.0};
    out.reserve(n_max + 1);
    for (std::size_t n = 0; n < n_max; ++n) {
        const double scale = static_cast<double>(n + 1) / horizon;
        double prefix = 0.0;
        next[0] = 0.0;
        for (std::size_t i = 1; i < nodes; ++i) {
            prefix += 0.5 * h * (u[i - 1] + u[i]);
            next[i] = scale * prefix;
        }
        u.swap(next);
        out.push_back(u.back() - 1.0);
    }
    return out;
}

/// Relative slack absorbed by discrete majorant checks at term n:
/// 10 h^2 T^2 D^2 max(1, ||psi_0||) plus the trapezoid simplex overshoot.
inline double quad_slack(const TimeGrid& grid, double D, double base_norm, double simplex_overshoot) {
    const double h = grid.step();
    const double horizon = grid.horizon();
    return 10.0 * h * h * horizon * horizon * D * D * std::max(1.0, base_norm) + std::max(0.0, simplex_overshoot);
}

} // namespace volterra
