#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/state_space.hpp"

namespace volterra {

/// Small dense complex matrix, row-major.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw StructuralError("matrix data size does not match its shape");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Complex operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::span<const Complex> data() const { return data_; }
    std::span<Complex> data() { return data_; }

    /// out += scale * (this * v).
    void multiply_accumulate(std::span<const Complex> v, Complex scale, std::span<Complex> out) const {
        if (v.size() != cols_ || out.size() != rows_) throw StructuralError("matrix-vector shape mismatch");
        for (std::size_t r = 0; r < rows_; ++r) {
            Complex s{};
            const Complex* row = data_.data() + r * cols_;
            for (std::size_t c = 0; c < cols_; ++c) s += row[c] * v[c];
            out[r] += scale * s;
        }
    }

    std::vector<Complex> operator*(std::span<const Complex> v) const {
        std::vector<Complex> out(rows_);
        multiply_accumulate(v, Complex{1.0}, out);
        return out;
    }

    DenseMatrix& operator*=(Complex s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    double max_abs_row_sum() const {
        double m = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < cols_; ++c) s += std::abs((*this)(r, c));
            m = std::max(m, s);
        }
        return m;
    }

    double max_abs_col_sum() const {
        double m = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
            m = std::max(m, s);
        }
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Largest singular value by power iteration on B^H B.
inline double spectral_norm(const DenseMatrix& b, int max_iterations = 20000, double rel_tol = 1e-15) {
    const std::size_t n = b.cols();
    if (n == 0 || b.rows() == 0) return 0.0;
    if (b.frobenius_norm() == 0.0) return 0.0;

    // Deterministic start with no special alignment to any basis vector.
    std::vector<Complex> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = Complex(1.0 + 0.1 * static_cast<double>(i), 0.05 * static_cast<double>(i % 3));
    auto normalize = [](std::vector<Complex>& v) {
        double s = 0.0;
        for (const auto& z : v) s += std::norm(z);
        const double inv = 1.0 / std::sqrt(s);
        for (auto& z : v) z *= inv;
    };
    normalize(x);

    std::vector<Complex> bx(b.rows()), y(n);
    double sigma = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        std::fill(bx.begin(), bx.end(), Complex{});
        b.multiply_accumulate(x, 1.0, bx);
        double bx_norm2 = 0.0;
        for (const auto& z : bx) bx_norm2 += std::norm(z);
        const double next = std::sqrt(bx_norm2);
        // y = B^H B x
        std::fill(y.begin(), y.end(), Complex{});
        for (std::size_t r = 0; r < b.rows(); ++r)
            for (std::size_t c = 0; c < n; ++c) y[c] += std::conj(b(r, c)) * bx[r];
        double ynorm = 0.0;
        for (const auto& z : y) ynorm += std::norm(z);
        if (ynorm == 0.0) return next;
        x = y;
        normalize(x);
        if (it > 2 && std::abs(next - sigma) <= rel_tol * next) return std::max(next, sigma);
        sigma = next;
    }
    return sigma;
}

/// Operator norm of b as a map on a space with the given norm kind. For the
/// sup and 1-norms the value is exact; for p = 2 (and grid L2, which differs
/// only by a common weight) it is the spectral norm; for other p the
/// Riesz-Thorin bound ||B||_1^{1/p} ||B||_inf^{1-1/p}.
inline double operator_norm(const DenseMatrix& b, const NormKind& kind) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, SupNorm>) {
                return b.max_abs_row_sum();
            } else if constexpr (std::is_same_v<K, GridL2Norm>) {
                return spectral_norm(b);
            } else {
                if (k.p == 1.0) return b.max_abs_col_sum();
                if (k.p == 2.0) return spectral_norm(b);
                return std::pow(b.max_abs_col_sum(), 1.0 / k.p) * std::pow(b.max_abs_row_sum(), 1.0 - 1.0 / k.p);
            }
        },
        kind);
}

} // namespace volterra
