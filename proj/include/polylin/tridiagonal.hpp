#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace polylin {

/// Tridiagonal matrix of size n stored as three bands.
/// lower[i] = A(i+1, i), upper[i] = A(i, i+1); both have n-1 entries.
struct TridiagonalMatrix {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    TridiagonalMatrix() = default;
    explicit TridiagonalMatrix(std::size_t n)
        : lower(n > 0 ? n - 1 : 0, 0.0), diag(n, 0.0), upper(n > 0 ? n - 1 : 0, 0.0) {}

    std::size_t size() const { return diag.size(); }

    std::vector<double> multiply(std::span<const double> x) const {
        const std::size_t n = size();
        if (x.size() != n) throw std::invalid_argument("tridiagonal multiply: size mismatch");
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += lower[i - 1] * x[i - 1];
            if (i + 1 < n) s += upper[i] * x[i + 1];
            y[i] = s;
        }
        return y;
    }

    /// Max absolute row sum.
    double norm_inf() const {
        double best = 0.0;
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            double s = std::abs(diag[i]);
            if (i > 0) s += std::abs(lower[i - 1]);
            if (i + 1 < n) s += std::abs(upper[i]);
            best = std::max(best, s);
        }
        return best;
    }
};

/// Thomas algorithm (no pivoting). Returns nullopt on a zero or non-finite pivot.
inline std::optional<std::vector<double>> thomas_solve(const TridiagonalMatrix& m, std::span<const double> rhs,
                                                       double shift = 0.0) {
    const std::size_t n = m.size();
    if (rhs.size() != n) throw std::invalid_argument("thomas_solve: size mismatch");
    if (n == 0) return std::vector<double>{};

    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    double pivot = m.diag[0] + shift;
    if (pivot == 0.0 || !std::isfinite(pivot)) return std::nullopt;
    if (n > 1) c[0] = m.upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = m.diag[i] + shift - m.lower[i - 1] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) return std::nullopt;
        if (i + 1 < n) c[i] = m.upper[i] / pivot;
        d[i] = (rhs[i] - m.lower[i - 1] * d[i - 1]) / pivot;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    for (double v : x)
        if (!std::isfinite(v)) return std::nullopt;
    return x;
}

} // namespace polylin
