#pragma once

// Finite-dimensional stand-ins for the Banach space B and for trajectories
// in L^p(I; B).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "volterra/errors.hpp"

namespace volterra {

using Complex = std::complex<double>;

/// Lebesgue exponent p in [1, inf]. Infinity is a distinct state, never a
/// large finite number.
class LpExponent {
public:
    constexpr LpExponent() = default;

    explicit LpExponent(double p) : value_(p), infinite_(false) {
        if (!(p >= 1.0) || std::isinf(p))
            throw InvalidParameter("Lebesgue exponent must satisfy 1 <= p < inf (use LpExponent::infinity())");
    }

    static constexpr LpExponent infinity() { return LpExponent{}; }

    constexpr bool is_infinite() const { return infinite_; }
    constexpr double value() const { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }

    /// Conjugate exponent q with 1/p + 1/q = 1.
    LpExponent conjugate() const {
        if (infinite_) return LpExponent(1.0);
        if (value_ == 1.0) return infinity();
        return LpExponent(value_ / (value_ - 1.0));
    }

    /// True for p = 1 and p = inf, the two cases sharing the e^{Dt} majorant.
    constexpr bool is_endpoint() const { return infinite_ || value_ == 1.0; }

    friend constexpr bool operator==(const LpExponent&, const LpExponent&) = default;

private:
    double value_ = 0.0;
    bool infinite_ = true;
};

inline std::string to_string(const LpExponent& p) {
    if (p.is_infinite()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", p.value());
    return buf;
}

struct SupNorm {
    friend constexpr bool operator==(const SupNorm&, const SupNorm&) = default;
};

struct PNorm {
    double p = 2.0;
    friend constexpr bool operator==(const PNorm&, const PNorm&) = default;
};

/// Cell-volume weighted l2 norm, approximating the L2 norm of a grid function.
struct GridL2Norm {
    double cell_width = 1.0;
    friend constexpr bool operator==(const GridL2Norm&, const GridL2Norm&) = default;
};

using NormKind = std::variant<SupNorm, PNorm, GridL2Norm>;

class SpaceDescriptor {
public:
    SpaceDescriptor(std::size_t dim, NormKind kind, std::string label = {})
        : dim_(dim), kind_(kind), label_(std::move(label)) {
        if (dim_ == 0) throw InvalidParameter("space dimension must be >= 1");
        if (const auto* g = std::get_if<GridL2Norm>(&kind_); g && !(g->cell_width > 0.0))
            throw InvalidParameter("grid_L2 cell width must be positive");
        if (const auto* pn = std::get_if<PNorm>(&kind_); pn && (!(pn->p >= 1.0) || std::isinf(pn->p)))
            throw InvalidParameter("p-norm exponent must satisfy 1 <= p < inf");
    }

    static SpaceDescriptor scalar() { return SpaceDescriptor(1, SupNorm{}, "C"); }

    std::size_t dim() const { return dim_; }
    const NormKind& norm_kind() const { return kind_; }
    const std::string& label() const { return label_; }

    /// Two descriptors describe the same space if dimension and norm agree;
    /// the label is cosmetic.
    bool same_as(const SpaceDescriptor& other) const { return dim_ == other.dim_ && kind_ == other.kind_; }

private:
    std::size_t dim_;
    NormKind kind_;
    std::string label_;
};

using SpacePtr = std::shared_ptr<const SpaceDescriptor>;

inline SpacePtr make_space(std::size_t dim, NormKind kind, std::string label = {}) {
    return std::make_shared<const SpaceDescriptor>(dim, kind, std::move(label));
}

class BanachElement {
public:
    BanachElement() = default;

    explicit BanachElement(SpacePtr space) : coords_(space ? space->dim() : 0), space_(std::move(space)) {
        if (!space_) throw StructuralError("element needs a space");
    }

    BanachElement(SpacePtr space, std::vector<Complex> coords) : coords_(std::move(coords)), space_(std::move(space)) {
        if (!space_) throw StructuralError("element needs a space");
        if (coords_.size() != space_->dim())
            throw StructuralError("coordinate count " + std::to_string(coords_.size()) + " does not match space dimension " +
                                  std::to_string(space_->dim()));
    }

    static BanachElement zero(const SpacePtr& space) { return BanachElement(space); }

    const SpacePtr& space() const { return space_; }
    std::size_t size() const { return coords_.size(); }
    std::span<const Complex> coords() const { return coords_; }
    std::span<Complex> coords() { return coords_; }
    Complex operator[](std::size_t i) const { return coords_[i]; }
    Complex& operator[](std::size_t i) { return coords_[i]; }

    bool shares_space(const BanachElement& other) const {
        return space_ == other.space_ || (space_ && other.space_ && space_->same_as(*other.space_));
    }

    void set_zero() { std::fill(coords_.begin(), coords_.end(), Complex{}); }

    friend bool operator==(const BanachElement& a, const BanachElement& b) {
        return a.shares_space(b) && a.coords_ == b.coords_;
    }

private:
    std::vector<Complex> coords_;
    SpacePtr space_;
};

inline void require_same_space(const BanachElement& a, const BanachElement& b, const char* where) {
    if (!a.shares_space(b)) throw StructuralError(std::string(where) + ": operands live in different spaces");
}

/// Norm of raw coordinates under a given norm kind.
inline double norm_of(std::span<const Complex> v, const NormKind& kind) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, SupNorm>) {
                double m = 0.0;
                for (const auto& z : v) m = std::max(m, std::abs(z));
                return m;
            } else if constexpr (std::is_same_v<K, PNorm>) {
                // Scale by the largest modulus so |z|^p neither overflows nor underflows.
                double scale = 0.0;
                for (const auto& z : v) scale = std::max(scale, std::abs(z));
                if (scale == 0.0) return 0.0;
                double s = 0.0;
                for (const auto& z : v) s += std::pow(std::abs(z) / scale, k.p);
                return scale * std::pow(s, 1.0 / k.p);
            } else {
                double s = 0.0;
                for (const auto& z : v) s += std::norm(z);
                return std::sqrt(s * k.cell_width);
            }
        },
        kind);
}

inline double norm(const BanachElement& v) {
    if (!v.space()) throw StructuralError("norm of an element without a space");
    if (v.size() != v.space()->dim()) throw StructuralError("coordinate count does not match space dimension");
    return norm_of(v.coords(), v.space()->norm_kind());
}

/// a*x + y.
inline BanachElement axpy(Complex a, const BanachElement& x, const BanachElement& y) {
    require_same_space(x, y, "axpy");
    BanachElement out = y;
    auto o = out.coords();
    auto xs = x.coords();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += a * xs[i];
    return out;
}

/// Uniform grid t_i = i*T/n on [0, T].
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t n_steps) : horizon_(horizon), n_steps_(n_steps) {
        if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidParameter("time horizon T must be positive and finite");
        if (n_steps == 0) throw InvalidParameter("n_steps must be >= 1");
    }

    double horizon() const { return horizon_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_nodes() const { return n_steps_ + 1; }
    double step() const { return horizon_ / static_cast<double>(n_steps_); }

    double node(std::size_t i) const {
        if (i == n_steps_) return horizon_;
        return static_cast<double>(i) * horizon_ / static_cast<double>(n_steps_);
    }

    std::vector<double> nodes() const {
        std::vector<double> out(n_nodes());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
        return out;
    }

    /// Trapezoid weight of node j in the integral over [0, t_upper], j <= upper.
    double trapezoid_weight(std::size_t j, std::size_t upper) const {
        if (upper == 0) return 0.0;
        return (j == 0 || j == upper) ? 0.5 * step() : step();
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double horizon_;
    std::size_t n_steps_;
};

/// A time-gridded function I -> B.
class Trajectory {
public:
    Trajectory(TimeGrid grid, SpacePtr space) : grid_(grid), space_(std::move(space)) {
        if (!space_) throw StructuralError("trajectory needs a space");
        values_.assign(grid_.n_nodes(), BanachElement(space_));
    }

    Trajectory(TimeGrid grid, std::vector<BanachElement> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.n_nodes())
            throw StructuralError("trajectory needs one value per node (" + std::to_string(grid_.n_nodes()) + "), got " +
                                  std::to_string(values_.size()));
        space_ = values_.front().space();
        for (const auto& v : values_)
            if (!v.shares_space(values_.front())) throw StructuralError("trajectory values must share one space");
    }

    /// Samples fn(t) -> BanachElement at every node.
    template <class Fn>
    static Trajectory sample(TimeGrid grid, const SpacePtr& space, Fn&& fn) {
        Trajectory out(grid, space);
        for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
            BanachElement v = fn(grid.node(i));
            if (!v.shares_space(out.values_[i])) throw StructuralError("sampled value is in the wrong space");
            out.values_[i] = std::move(v);
        }
        return out;
    }

    const TimeGrid& grid() const { return grid_; }
    const SpacePtr& space() const { return space_; }
    std::size_t size() const { return values_.size(); }
    const BanachElement& operator[](std::size_t i) const { return values_[i]; }
    BanachElement& operator[](std::size_t i) { return values_[i]; }
    const std::vector<BanachElement>& values() const { return values_; }

    bool compatible_with(const Trajectory& other) const {
        return grid_ == other.grid_ && values_.front().shares_space(other.values_.front());
    }

    /// Pointwise norms ||phi(t_i)||.
    std::vector<double> pointwise_norms() const {
        std::vector<double> out(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) out[i] = norm(values_[i]);
        return out;
    }

private:
    TimeGrid grid_;
    SpacePtr space_;
    std::vector<BanachElement> values_;
};

inline void require_compatible(const Trajectory& a, const Trajectory& b, const char* where) {
    if (!(a.grid() == b.grid())) throw StructuralError(std::string(where) + ": trajectories live on different time grids");
    if (!a[0].shares_space(b[0])) throw StructuralError(std::string(where) + ": trajectories live in different spaces");
}

/// a*x + y, nodewise.
inline Trajectory axpy(Complex a, const Trajectory& x, const Trajectory& y) {
    require_compatible(x, y, "axpy");
    Trajectory out = y;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto o = out[i].coords();
        auto xs = x[i].coords();
        for (std::size_t k = 0; k < o.size(); ++k) o[k] += a * xs[k];
    }
    return out;
}

/// L^p(0, t_upper) norm of a sequence of pointwise norms sampled on the grid.
/// p = inf is the nodal maximum; p < inf uses the composite trapezoid rule.
inline double lp_norm_of_samples(std::span<const double> pointwise, const TimeGrid& grid, LpExponent p,
                                 std::size_t upper) {
    if (upper >= pointwise.size()) throw StructuralError("lp_time_norm: subinterval end beyond the grid");
    if (p.is_infinite()) {
        double m = 0.0;
        for (std::size_t i = 0; i <= upper; ++i) m = std::max(m, pointwise[i]);
        return m;
    }
    if (upper == 0) return 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i <= upper; ++i) scale = std::max(scale, pointwise[i]);
    if (scale == 0.0) return 0.0;
    const double pv = p.value();
    double s = 0.0;
    for (std::size_t i = 0; i <= upper; ++i) s += grid.trapezoid_weight(i, upper) * std::pow(pointwise[i] / scale, pv);
    return scale * std::pow(s, 1.0 / pv);
}

/// ||phi||_{L^p(0,T; B)}.
inline double lp_time_norm(const Trajectory& phi, LpExponent p) {
    const auto n = phi.pointwise_norms();
    return lp_norm_of_samples(n, phi.grid(), p, n.size() - 1);
}

/// ||phi||_{L^p(0,t_upper; B)} over the subinterval J = (0, t_upper).
inline double lp_time_norm(const Trajectory& phi, LpExponent p, std::size_t upper) {
    const auto n = phi.pointwise_norms();
    return lp_norm_of_samples(n, phi.grid(), p, upper);
}

/// sup_i ||a(t_i) - b(t_i)||.
inline double sup_distance(const Trajectory& a, const Trajectory& b) {
    require_compatible(a, b, "sup_distance");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, norm(axpy(Complex{-1.0}, b[i], a[i])));
    return m;
}

} // namespace volterra
