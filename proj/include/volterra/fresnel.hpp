#pragma once

// Abel-summed Fresnel integrals: int_{R^n} e^{i|z|^2} dz = (pi i)^{n/2}, as
// the alpha -> 0 limit of int e^{(i - alpha)|z|^2} dz.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/state_space.hpp"

namespace volterra {

class AbelSchedule {
public:
    explicit AbelSchedule(std::vector<double> alphas) : alphas_(std::move(alphas)) {
        if (alphas_.empty()) throw InvalidParameter("Abel schedule is empty");
        for (std::size_t k = 0; k < alphas_.size(); ++k) {
            if (!(alphas_[k] > 0.0)) throw InvalidParameter("Abel schedule entries must be positive");
            if (k > 0 && !(alphas_[k] < alphas_[k - 1])) throw InvalidParameter("Abel schedule must be strictly decreasing");
        }
    }

    /// start * factor^k, k = 0..length-1.
    static AbelSchedule geometric(std::size_t length = 21, double start = 1.0, double factor = 0.5) {
        if (length == 0) throw InvalidParameter("Abel schedule length must be positive");
        if (!(factor > 0.0 && factor < 1.0)) throw InvalidParameter("Abel schedule factor must lie in (0, 1)");
        std::vector<double> a(length);
        for (std::size_t k = 0; k < length; ++k) a[k] = start * std::pow(factor, static_cast<double>(k));
        return AbelSchedule(std::move(a));
    }

    const std::vector<double>& alphas() const { return alphas_; }
    std::size_t size() const { return alphas_.size(); }

private:
    std::vector<double> alphas_;
};

/// (pi / (alpha - i))^{n/2}, principal branch. alpha - i stays in the open
/// right half plane for alpha >= 0, so no branch cut is crossed.
inline Complex fresnel_closed(int n, double alpha) {
    if (n < 1) throw InvalidParameter("fresnel_closed: n must be >= 1");
    if (!(alpha >= 0.0)) throw InvalidParameter("fresnel_closed: alpha must be nonnegative");
    const Complex base = std::numbers::pi / Complex(alpha, -1.0);
    return std::exp(0.5 * static_cast<double>(n) * std::log(base));
}

/// Trapezoid rule for int_{-R}^{R} e^{(i - alpha) x^2} dx. The step is
/// shrunk to R / ceil(R / h) so both ends are nodes.
inline Complex fresnel_quadrature(double alpha, double R, double h) {
    if (!(alpha > 0.0)) throw InvalidParameter("fresnel_quadrature: alpha must be positive; alpha = 0 leaves the tail uncontrolled");
    if (!(R > 0.0) || !(h > 0.0)) throw InvalidParameter("fresnel_quadrature: R and h must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil(R / h));
    const double dx = R / static_cast<double>(steps);
    const Complex c(-alpha, 1.0);
    auto f = [&](double x) { return std::exp(c * x * x); };
    // Even integrand: 2 * (half-line sum) - f(0).
    Complex s = 0.5 * f(R);
    for (std::size_t k = steps - 1; k >= 1; --k) s += f(static_cast<double>(k) * dx);
    s = 2.0 * s + f(0.0);
    return s * dx;
}

/// Quadrature parameters for a given alpha: R where the damping reaches
/// e^{-40}, and a step small enough that the first aliased stationary point
/// at pi / h lies beyond 2R.
inline Complex fresnel_quadrature_auto(double alpha, double h_max = 1e-3) {
    const double R = std::sqrt(40.0 / alpha);
    const double h = std::min(h_max, std::numbers::pi / (2.0 * R));
    return fresnel_quadrature(alpha, R, h);
}

struct AbelLimit {
    Complex value;
    double error_estimate = 0.0;
    std::vector<Complex> samples;  ///< f(alpha_k) along the schedule
};

/// Extrapolates f(alpha_k) to alpha = 0 with a least-squares line through the
/// last (up to) four schedule points. The error estimate is |f(alpha_K) - f(alpha_{K-1})|.
inline AbelLimit abel_limit(const std::function<Complex(double)>& f, const AbelSchedule& sched) {
    AbelLimit out;
    for (double a : sched.alphas()) out.samples.push_back(f(a));
    const std::size_t K = out.samples.size();
    if (K == 1) {
        out.value = out.samples[0];
        return out;
    }
    out.error_estimate = std::abs(out.samples[K - 1] - out.samples[K - 2]);
    const std::size_t first = K >= 4 ? K - 4 : 0;
    const double m = static_cast<double>(K - first);
    double abar = 0.0;
    Complex fbar{};
    for (std::size_t k = first; k < K; ++k) {
        abar += sched.alphas()[k];
        fbar += out.samples[k];
    }
    abar /= m;
    fbar /= m;
    double saa = 0.0;
    Complex saf{};
    for (std::size_t k = first; k < K; ++k) {
        const double da = sched.alphas()[k] - abar;
        saa += da * da;
        saf += da * (out.samples[k] - fbar);
    }
    const Complex slope = saf / saa;
    out.value = fbar - slope * abar;
    return out;
}

/// Surface area of the unit sphere in R^n: 2 pi^{n/2} / Gamma(n/2).
inline double unit_sphere_area(int n) {
    if (n < 1) throw InvalidParameter("unit_sphere_area: n must be >= 1");
    const double h = 0.5 * static_cast<double>(n);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// i^{n/2} omega_n Gamma(n/2) / 2 with i^m = e^{i pi m / 2}.
inline Complex gamma_route(int n) {
    if (n < 1) throw InvalidParameter("gamma_route: n must be >= 1");
    const double h = 0.5 * static_cast<double>(n);
    const Complex i_pow = std::exp(Complex(0.0, 0.5 * std::numbers::pi * h));
    return i_pow * unit_sphere_area(n) * std::tgamma(h) / 2.0;
}

/// Radial form of the Abel-regularized integral after t = rho^2:
/// (omega_n / 2) int_0^inf t^{(n-2)/2} e^{-(alpha - i) t} dt = (omega_n / 2) Gamma(n/2) (alpha - i)^{-n/2}.
inline Complex radial_abel_closed(int n, double alpha) {
    if (!(alpha >= 0.0)) throw InvalidParameter("radial_abel_closed: alpha must be nonnegative");
    const double h = 0.5 * static_cast<double>(n);
    return 0.5 * unit_sphere_area(n) * std::tgamma(h) * std::exp(-h * std::log(Complex(alpha, -1.0)));
}

} // namespace volterra
