#pragma once

// Spectral free Schrodinger propagator on a periodic 1-D grid.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/state_space.hpp"

namespace volterra {

/// hbar and m; a^2 = hbar^2 / (2m). Defaults hbar = 1, m = 1/2 give a^2 = 1,
/// i.e. the kernel (4 pi i t)^{-n/2} exp(i|x-y|^2 / 4t).
struct PhysicalParams {
    double hbar = 1.0;
    double mass = 0.5;

    void validate() const {
        if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidParameter("hbar must be positive");
        if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidParameter("mass must be positive");
    }
    double a_squared() const { return hbar * hbar / (2.0 * mass); }
    /// Dispersion coefficient beta = a^2 / hbar in u_t = i beta u_xx.
    double dispersion() const { return a_squared() / hbar; }

    friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;
};

/// Uniform periodic grid x_j = x_min + j*dx, j = 0..n_points-1, dx = (x_max - x_min)/n_points.
class SpatialGrid {
public:
    SpatialGrid(double x_min, double x_max, std::size_t n_points) : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
        if (!(x_max > x_min)) throw InvalidParameter("spatial grid needs x_max > x_min");
        if (n_points < 8 || (n_points & (n_points - 1)) != 0)
            throw InvalidParameter("spatial grid needs a power-of-two point count >= 8");
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_points_; }
    double length() const { return x_max_ - x_min_; }
    double dx() const { return length() / static_cast<double>(n_points_); }
    double x(std::size_t j) const { return x_min_ + static_cast<double>(j) * dx(); }

    /// Angular wave number of FFT mode m.
    double wave_number(std::size_t m) const {
        const auto n = static_cast<std::ptrdiff_t>(n_points_);
        auto s = static_cast<std::ptrdiff_t>(m);
        if (s >= n / 2) s -= n;
        return 2.0 * std::numbers::pi * static_cast<double>(s) / length();
    }

    /// The grid_L2 Banach space this grid discretizes.
    SpacePtr space() const { return make_space(n_points_, GridL2Norm{dx()}, "L2(grid)"); }

    friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_points_;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};

using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

} // namespace detail

/// Forward/inverse FFT pair for one grid size plus the free-evolution phase
/// e^{-i beta k^2 t}. Plans are immutable after construction and executed
/// through the new-array interface, so concurrent use is safe.
class FreePropagator {
public:
    FreePropagator(SpatialGrid grid, PhysicalParams params) : grid_(grid), params_(params) {
        params_.validate();
        const int n = static_cast<int>(grid_.size());
        std::vector<Complex> scratch_in(grid_.size()), scratch_out(grid_.size());
        auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
        auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
        std::lock_guard lock(detail::fftw_planner_mutex());
        forward_.reset(fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED));
        backward_.reset(fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED));
        if (!forward_ || !backward_) throw std::runtime_error("FFTW plan creation failed");
        k_squared_.resize(grid_.size());
        for (std::size_t m = 0; m < grid_.size(); ++m) {
            const double k = grid_.wave_number(m);
            k_squared_[m] = k * k;
        }
    }

    const SpatialGrid& grid() const { return grid_; }
    const PhysicalParams& params() const { return params_; }
    std::span<const double> k_squared() const { return k_squared_; }

    /// Unnormalized forward DFT.
    void forward(std::span<const Complex> in, std::span<Complex> out) const {
        check(in, out);
        fftw_execute_dft(forward_.get(), const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data())),
                         reinterpret_cast<fftw_complex*>(out.data()));
    }

    /// Inverse DFT including the 1/N normalization.
    void inverse(std::span<const Complex> in, std::span<Complex> out) const {
        check(in, out);
        fftw_execute_dft(backward_.get(), const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data())),
                         reinterpret_cast<fftw_complex*>(out.data()));
        const double scale = 1.0 / static_cast<double>(grid_.size());
        for (auto& z : out) z *= scale;
    }

    /// Phase e^{-i beta k_m^2 t} of mode m after time t.
    Complex phase(std::size_t m, double t) const {
        const double angle = -params_.dispersion() * k_squared_[m] * t;
        return {std::cos(angle), std::sin(angle)};
    }

    /// out = U_f(t) in. t = 0 copies exactly.
    void evolve(std::span<const Complex> in, double t, std::span<Complex> out) const {
        if (in.size() != grid_.size() || out.size() != grid_.size())
            throw StructuralError("free evolution: state size does not match the grid");
        if (t == 0.0) {
            std::copy(in.begin(), in.end(), out.begin());
            return;
        }
        std::vector<Complex> spectrum(grid_.size());
        forward(in, spectrum);
        for (std::size_t m = 0; m < spectrum.size(); ++m) spectrum[m] *= phase(m, t);
        inverse(spectrum, out);
    }

private:
    void check(std::span<const Complex> in, std::span<Complex> out) const {
        if (in.size() != grid_.size() || out.size() != grid_.size())
            throw StructuralError("FFT: buffer size does not match the grid");
    }

    SpatialGrid grid_;
    PhysicalParams params_;
    detail::FftwPlan forward_;
    detail::FftwPlan backward_;
    std::vector<double> k_squared_;
};

using PropagatorPtr = std::shared_ptr<const FreePropagator>;

inline PropagatorPtr make_propagator(SpatialGrid grid, PhysicalParams params = {}) {
    return std::make_shared<const FreePropagator>(grid, params);
}

} // namespace volterra
