#pragma once

// Operator-valued Volterra kernels A(t, tau): B -> B with a uniform bound D.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/matrix.hpp"
#include "volterra/propagator.hpp"
#include "volterra/random.hpp"
#include "volterra/state_space.hpp"

namespace volterra {

/// A named scalar function k(t, tau) with parameters.
///
///   constant     [re, im]                      re + i im
///   exponential  [a, b]                        a e^{b (t - tau)}
///   cosine       [a, w]                        a cos(w (t - tau))
///   phase        [a, w]                        a e^{i w (t - tau)}
///   trig_mix     [c, (r, w, v, phi)...]        c (1 + sum_m r_m cos(w_m t + v_m tau + phi_m))
class ScalarFunction {
public:
    ScalarFunction(std::string id, std::vector<double> params) : id_(std::move(id)), params_(std::move(params)) {
        auto need = [&](std::size_t n) {
            if (params_.size() != n)
                throw InvalidParameter("scalar function '" + id_ + "' expects " + std::to_string(n) + " parameters, got " +
                                       std::to_string(params_.size()));
        };
        if (id_ == "constant" || id_ == "exponential" || id_ == "cosine" || id_ == "phase") {
            need(2);
        } else if (id_ == "trig_mix") {
            if (params_.empty() || (params_.size() - 1) % 4 != 0)
                throw InvalidParameter("scalar function 'trig_mix' expects 1 + 4m parameters");
        } else {
            throw InvalidParameter("unknown scalar function '" + id_ + "'");
        }
        for (double p : params_)
            if (!std::isfinite(p)) throw InvalidParameter("scalar function parameters must be finite");
    }

    const std::string& id() const { return id_; }
    const std::vector<double>& params() const { return params_; }

    Complex operator()(double t, double tau) const {
        const auto& p = params_;
        if (id_ == "constant") return {p[0], p[1]};
        if (id_ == "exponential") return p[0] * std::exp(p[1] * (t - tau));
        if (id_ == "cosine") return p[0] * std::cos(p[1] * (t - tau));
        if (id_ == "phase") return p[0] * std::exp(Complex(0.0, p[1] * (t - tau)));
        double s = 1.0;
        for (std::size_t m = 1; m + 3 < p.size(); m += 4) s += p[m] * std::cos(p[m + 1] * t + p[m + 2] * tau + p[m + 3]);
        return p[0] * s;
    }

private:
    std::string id_;
    std::vector<double> params_;
};

/// Positive smooth kernel c (1 + sum of three random cosine modes), amplitudes
/// summing below 0.9 so the kernel stays in (0.1c, 1.9c).
inline ScalarFunction random_trig_mix(CounterRng& rng, double scale) {
    std::vector<double> p{scale};
    for (int m = 0; m < 3; ++m) {
        p.push_back(rng.uniform(0.0, 0.3));
        p.push_back(rng.uniform(-4.0, 4.0));
        p.push_back(rng.uniform(-4.0, 4.0));
        p.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    }
    return ScalarFunction("trig_mix", std::move(p));
}

/// A named bounded potential V(x, t) with its sup bound C.
///
///   zero             []          0
///   constant         [V0]        V0
///   lorentzian       [A]         A / (1 + x^2)
///   pulsed_gaussian  [A, w]      A e^{-x^2} cos(w t)
class PotentialSpec {
public:
    PotentialSpec(std::string id, std::vector<double> params) : id_(std::move(id)), params_(std::move(params)) {
        auto need = [&](std::size_t n) {
            if (params_.size() != n)
                throw InvalidParameter("potential '" + id_ + "' expects " + std::to_string(n) + " parameters");
        };
        if (id_ == "zero") {
            need(0);
            sup_bound_ = 0.0;
        } else if (id_ == "constant" || id_ == "lorentzian") {
            need(1);
            sup_bound_ = std::abs(params_[0]);
        } else if (id_ == "pulsed_gaussian") {
            need(2);
            sup_bound_ = std::abs(params_[0]);
        } else {
            throw InvalidParameter("unknown potential '" + id_ + "'");
        }
        for (double p : params_)
            if (!std::isfinite(p)) throw InvalidParameter("potential parameters must be finite");
    }

    static PotentialSpec zero() { return {"zero", {}}; }
    static PotentialSpec constant(double v0) { return {"constant", {v0}}; }
    static PotentialSpec lorentzian(double amplitude) { return {"lorentzian", {amplitude}}; }

    const std::string& id() const { return id_; }
    const std::vector<double>& params() const { return params_; }
    /// C = sup |V(x, t)|.
    double sup_bound() const { return sup_bound_; }

    double operator()(double x, double t) const {
        if (id_ == "zero") return 0.0;
        if (id_ == "constant") return params_[0];
        if (id_ == "lorentzian") return params_[0] / (1.0 + x * x);
        return params_[0] * std::exp(-x * x) * std::cos(params_[1] * t);
    }

    bool is_constant() const { return id_ == "zero" || id_ == "constant"; }

private:
    std::string id_;
    std::vector<double> params_;
    double sup_bound_ = 0.0;
};

struct ScalarConstant {
    Complex lambda;
};

struct ScalarSmooth {
    ScalarFunction k;
};

/// A(t, tau) = g(t, tau) B.
struct MatrixSeparable {
    DenseMatrix b;
    ScalarFunction g;
};

/// (A(t, tau) v)_x = sum_y K(x, t; y, tau) v_y dy, with K sampled at every
/// (t_i, tau_j) of the kernel's time grid, row-major in (i, j), including the
/// upper triangle tau > t that the engine must never read. Off-node times use
/// bilinear interpolation.
struct HilbertSchmidtGrid {
    std::shared_ptr<const std::vector<DenseMatrix>> samples;
    double cell_width = 1.0;
};

/// A(t, tau) = -(i / hbar) U_f(t - tau) V(tau).
struct DysonSchrodinger {
    PotentialSpec potential;
    PropagatorPtr propagator;
};

class KernelSpec {
public:
    using Variant = std::variant<ScalarConstant, ScalarSmooth, MatrixSeparable, HilbertSchmidtGrid, DysonSchrodinger>;

    KernelSpec(Variant variant, SpacePtr space, TimeGrid grid, std::optional<double> declared_bound = std::nullopt)
        : variant_(std::move(variant)), space_(std::move(space)), grid_(grid), declared_bound_(declared_bound) {
        if (!space_) throw StructuralError("kernel needs a space");
        if (declared_bound_ && (!(*declared_bound_ >= 0.0) || !std::isfinite(*declared_bound_)))
            throw InvalidParameter("declared kernel bound must be finite and nonnegative");
        validate();
        computed_bound_ = compute_bound();
    }

    const Variant& variant() const { return variant_; }
    const SpacePtr& space() const { return space_; }
    const TimeGrid& grid() const { return grid_; }
    std::optional<double> declared_bound() const { return declared_bound_; }
    /// Bound obtained from the variant itself, ignoring any declared value.
    double computed_bound() const { return computed_bound_; }

    const DysonSchrodinger* as_dyson() const { return std::get_if<DysonSchrodinger>(&variant_); }

    KernelSpec with_declared_bound(std::optional<double> d) const {
        KernelSpec out = *this;
        if (d && (!(*d >= 0.0) || !std::isfinite(*d))) throw InvalidParameter("declared kernel bound must be finite and nonnegative");
        out.declared_bound_ = d;
        return out;
    }

    /// Test hook: a copy whose raw formula yields `value * v` whenever it is
    /// evaluated at tau > t. The Volterra engine must be insensitive to it.
    KernelSpec with_upper_probe(Complex value) const {
        KernelSpec out = *this;
        out.upper_probe_ = value;
        return out;
    }

    bool in_domain(double t) const {
        const double eps = 1e-12 * grid_.horizon();
        return t >= -eps && t <= grid_.horizon() + eps;
    }

    /// acc += weight * A(t, tau) v by the variant's raw formula, with no
    /// Volterra guard. Only the engine and oracles (which restrict themselves
    /// to tau <= t) and apply() call this.
    void accumulate_raw(double t, double tau, Complex weight, std::span<const Complex> v, std::span<Complex> acc) const {
        if (tau > t && upper_probe_) {
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += weight * (*upper_probe_) * v[k];
            return;
        }
        std::visit([&](const auto& kern) { accumulate_variant(kern, t, tau, weight, v, acc); }, variant_);
    }

private:
    void validate() const {
        if (const auto* m = std::get_if<MatrixSeparable>(&variant_)) {
            if (m->b.rows() != space_->dim() || m->b.cols() != space_->dim())
                throw StructuralError("separable kernel matrix does not match the space dimension");
        } else if (const auto* hs = std::get_if<HilbertSchmidtGrid>(&variant_)) {
            if (!hs->samples) throw StructuralError("Hilbert-Schmidt kernel has no samples");
            const std::size_t n = grid_.n_nodes();
            if (hs->samples->size() != n * n)
                throw StructuralError("Hilbert-Schmidt kernel needs one sample per (t_i, tau_j) node pair");
            for (const auto& k : *hs->samples)
                if (k.rows() != space_->dim() || k.cols() != space_->dim())
                    throw StructuralError("Hilbert-Schmidt sample does not match the space dimension");
            const auto* l2 = std::get_if<GridL2Norm>(&space_->norm_kind());
            if (!l2 || l2->cell_width != hs->cell_width)
                throw StructuralError("Hilbert-Schmidt kernel needs a grid_L2 space with the kernel's cell width");
        } else if (const auto* d = std::get_if<DysonSchrodinger>(&variant_)) {
            if (!d->propagator) throw StructuralError("Dyson kernel has no propagator");
            const SpacePtr grid_space = d->propagator->grid().space();
            if (!grid_space->same_as(*space_)) throw StructuralError("Dyson kernel needs the grid_L2 space of its spatial grid");
        }
    }

    double sample_max_abs(const ScalarFunction& f) const {
        double m = 0.0;
        for (std::size_t i = 0; i < grid_.n_nodes(); ++i)
            for (std::size_t j = 0; j <= i; ++j) m = std::max(m, std::abs(f(grid_.node(i), grid_.node(j))));
        return m;
    }

    double compute_bound() const {
        return std::visit(
            [&](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ScalarConstant>) {
                    return std::abs(k.lambda);
                } else if constexpr (std::is_same_v<K, ScalarSmooth>) {
                    return sample_max_abs(k.k);
                } else if constexpr (std::is_same_v<K, MatrixSeparable>) {
                    return operator_norm(k.b, space_->norm_kind()) * sample_max_abs(k.g);
                } else if constexpr (std::is_same_v<K, HilbertSchmidtGrid>) {
                    const std::size_t n = grid_.n_nodes();
                    double m = 0.0;
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j <= i; ++j)
                            m = std::max(m, k.cell_width * (*k.samples)[i * n + j].frobenius_norm());
                    return m;
                } else {
                    return k.potential.sup_bound() / k.propagator->params().hbar;
                }
            },
            variant_);
    }

    void accumulate_variant(const ScalarConstant& k, double, double, Complex w, std::span<const Complex> v,
                            std::span<Complex> acc) const {
        const Complex s = w * k.lambda;
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s * v[i];
    }

    void accumulate_variant(const ScalarSmooth& k, double t, double tau, Complex w, std::span<const Complex> v,
                            std::span<Complex> acc) const {
        const Complex s = w * k.k(t, tau);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s * v[i];
    }

    void accumulate_variant(const MatrixSeparable& k, double t, double tau, Complex w, std::span<const Complex> v,
                            std::span<Complex> acc) const {
        k.b.multiply_accumulate(v, w * k.g(t, tau), acc);
    }

    void accumulate_variant(const HilbertSchmidtGrid& k, double t, double tau, Complex w, std::span<const Complex> v,
                            std::span<Complex> acc) const {
        const std::size_t n = grid_.n_nodes();
        const auto [i0, ft] = locate(t);
        const auto [j0, fs] = locate(tau);
        const double wt[2] = {1.0 - ft, ft};
        const double ws[2] = {1.0 - fs, fs};
        for (int a = 0; a < 2; ++a) {
            if (wt[a] == 0.0) continue;
            for (int b = 0; b < 2; ++b) {
                if (ws[b] == 0.0) continue;
                const auto& m = (*k.samples)[(i0 + a) * n + (j0 + b)];
                m.multiply_accumulate(v, w * (wt[a] * ws[b] * k.cell_width), acc);
            }
        }
    }

    void accumulate_variant(const DysonSchrodinger& k, double t, double tau, Complex w, std::span<const Complex> v,
                            std::span<Complex> acc) const {
        const auto& prop = *k.propagator;
        const auto& sg = prop.grid();
        std::vector<Complex> g(v.size()), u(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) g[j] = k.potential(sg.x(j), tau) * v[j];
        prop.evolve(g, t - tau, u);
        const Complex s = w * Complex(0.0, -1.0 / prop.params().hbar);
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += s * u[j];
    }

    /// Grid cell index and fractional offset of time t; exact nodes give offset 0.
    std::pair<std::size_t, double> locate(double t) const {
        const double h = grid_.step();
        const std::size_t last = grid_.n_steps();
        double s = std::clamp(t / h, 0.0, static_cast<double>(last));
        auto i = static_cast<std::size_t>(std::floor(s));
        double f = s - static_cast<double>(i);
        if (f < 1e-9) f = 0.0;
        if (f > 1.0 - 1e-9) {
            ++i;
            f = 0.0;
        }
        if (i >= last) return {last, 0.0};
        return {i, f};
    }

    Variant variant_;
    SpacePtr space_;
    TimeGrid grid_;
    std::optional<double> declared_bound_;
    double computed_bound_ = 0.0;
    std::optional<Complex> upper_probe_;
};

/// D: the declared bound if present, else the variant's own bound.
inline double uniform_bound(const KernelSpec& k) { return k.declared_bound().value_or(k.computed_bound()); }

/// A(t, tau) v, and the zero element for tau > t.
inline BanachElement apply(const KernelSpec& k, double t, double tau, const BanachElement& v) {
    if (!v.space() || !v.space()->same_as(*k.space())) throw StructuralError("apply: element is not in the kernel's space");
    if (!k.in_domain(t) || !k.in_domain(tau)) throw InvalidParameter("apply: t and tau must lie in [0, T]");
    BanachElement out(v.space());
    if (tau > t) return out;
    k.accumulate_raw(t, tau, Complex{1.0}, v.coords(), out.coords());
    return out;
}

inline KernelSpec scalar_constant_kernel(Complex lambda, const TimeGrid& grid, SpacePtr space = nullptr) {
    if (!space) space = make_space(1, SupNorm{}, "C");
    return KernelSpec(ScalarConstant{lambda}, std::move(space), grid);
}

inline KernelSpec scalar_smooth_kernel(ScalarFunction k, const TimeGrid& grid, SpacePtr space = nullptr) {
    if (!space) space = make_space(1, SupNorm{}, "C");
    return KernelSpec(ScalarSmooth{std::move(k)}, std::move(space), grid);
}

/// Random Hilbert-Schmidt-style matrix kernel
///   K(t, tau) = R1 + cos(2 pi (t - tau) / T) R2 + (tau / T) R3,
/// entries of R_m uniform in the complex unit square, scaled so that the
/// largest discrete Hilbert-Schmidt norm over tau <= t equals target_bound.
inline KernelSpec random_hilbert_schmidt_kernel(std::size_t dim, double target_bound, const TimeGrid& grid, CounterRng rng,
                                                double cell_width = 1.0) {
    if (!(target_bound > 0.0)) throw InvalidParameter("Hilbert-Schmidt target bound must be positive");
    auto space = make_space(dim, GridL2Norm{cell_width}, "L2(grid)");
    DenseMatrix r[3];
    for (auto& m : r) {
        m = DenseMatrix(dim, dim);
        for (auto& z : m.data()) {
            const double re = rng.uniform();
            const double im = rng.uniform();
            z = Complex(re, im);
        }
    }
    const std::size_t n = grid.n_nodes();
    const double horizon = grid.horizon();
    std::vector<DenseMatrix> samples(n * n, DenseMatrix(dim, dim));
    double max_hs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double t = grid.node(i), tau = grid.node(j);
            const double c2 = std::cos(2.0 * std::numbers::pi * (t - tau) / horizon);
            const double c3 = tau / horizon;
            auto& s = samples[i * n + j];
            for (std::size_t e = 0; e < dim * dim; ++e) s.data()[e] = r[0].data()[e] + c2 * r[1].data()[e] + c3 * r[2].data()[e];
            if (j <= i) max_hs = std::max(max_hs, cell_width * s.frobenius_norm());
        }
    }
    const double scale = target_bound / max_hs;
    for (auto& s : samples) s *= scale;
    return KernelSpec(HilbertSchmidtGrid{std::make_shared<const std::vector<DenseMatrix>>(std::move(samples)), cell_width},
                      std::move(space), grid);
}

/// Copy of a sampled Hilbert-Schmidt kernel with every tau > t sample
/// overwritten by `value` in each entry.
inline KernelSpec mutate_upper_samples(const KernelSpec& k, Complex value) {
    const auto* hs = std::get_if<HilbertSchmidtGrid>(&k.variant());
    if (!hs) throw StructuralError("mutate_upper_samples needs a sampled Hilbert-Schmidt kernel");
    auto samples = *hs->samples;
    const std::size_t n = k.grid().n_nodes();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (auto& z : samples[i * n + j].data()) z = value;
    return KernelSpec(HilbertSchmidtGrid{std::make_shared<const std::vector<DenseMatrix>>(std::move(samples)), hs->cell_width},
                      k.space(), k.grid(), k.declared_bound());
}

} // namespace volterra
