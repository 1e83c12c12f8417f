#pragma once

// Uniform and error-equalizing partitions.
//
// The error-equalizing partition places knots where the cumulative knot
// distribution F(x) = int_a^x d / int_a^b d crosses i/N, with the local density
// d(x) = |f''(x)|^(1/3). Each subinterval then carries about the same share of
// the interpolation error.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "polylin/core.hpp"
#include "polylin/errors.hpp"
#include "polylin/quadrature.hpp"

namespace polylin {

struct DistributionOptions {
    std::size_t panels = 4096;
    double rel_tol = 1e-10;
    double abscissa_tol = 1e-12;
};

/// Tabulated cumulative knot distribution F over [a, b].
class KnotDistribution {
public:
    KnotDistribution(std::function<double(double)> density, double a, double b, DistributionOptions opts = {})
        : density_(std::move(density)), opts_(opts) {
        if (!(a < b)) throw std::invalid_argument("knot distribution requires a < b");
        const std::size_t panels = std::max<std::size_t>(opts_.panels, 1);
        grid_.resize(panels + 1);
        for (std::size_t j = 0; j <= panels; ++j)
            grid_[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(panels);
        grid_.back() = b;

        // Composite Simpson pass fixes the scale for the per-panel tolerance.
        double rough = 0.0;
        bool any_nonzero = false;
        double left = sample(a);
        any_nonzero |= left != 0.0;
        for (std::size_t j = 0; j < panels; ++j) {
            const double mid = sample(0.5 * (grid_[j] + grid_[j + 1]));
            const double right = sample(grid_[j + 1]);
            any_nonzero |= mid != 0.0 || right != 0.0;
            rough += (grid_[j + 1] - grid_[j]) * (left + 4.0 * mid + right) / 6.0;
            left = right;
        }
        if (!any_nonzero || rough <= 0.0) throw linear_function_error();

        panel_tol_ = opts_.rel_tol * rough / static_cast<double>(panels);
        unnormalized_.assign(panels + 1, 0.0);
        for (std::size_t j = 0; j < panels; ++j) {
            auto r = quad::integrate([this](double x) { return sample(x); }, grid_[j], grid_[j + 1], panel_tol_, 0.0);
            unnormalized_[j + 1] = unnormalized_[j] + r.value;
        }
        normalizer_ = unnormalized_.back();
        if (!(normalizer_ > 0.0)) throw linear_function_error();
        cumulative_.resize(panels + 1);
        for (std::size_t j = 0; j <= panels; ++j) cumulative_[j] = unnormalized_[j] / normalizer_;
        cumulative_.front() = 0.0;
        cumulative_.back() = 1.0;
    }

    double a() const { return grid_.front(); }
    double b() const { return grid_.back(); }
    /// int_a^b density.
    double normalizer() const { return normalizer_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& cumulative() const { return cumulative_; }
    double density(double x) const { return density_(x); }

    /// F(x), refined inside the tabulation panel by adaptive quadrature.
    double operator()(double x) const {
        if (x <= a()) return 0.0;
        if (x >= b()) return 1.0;
        const std::size_t j = panel_of(x);
        return (unnormalized_[j] + partial(j, x)) / normalizer_;
    }

    /// Smallest x (to the abscissa tolerance) with F(x) >= target; on a flat
    /// stretch of F this is its left edge.
    double inverse(double target) const {
        if (target <= 0.0) return a();
        if (target >= 1.0) return b();
        const double goal = target * normalizer_;
        auto it = std::lower_bound(unnormalized_.begin(), unnormalized_.end(), goal);
        std::size_t k = static_cast<std::size_t>(it - unnormalized_.begin());
        k = std::clamp<std::size_t>(k, 1, grid_.size() - 1);
        const std::size_t j = k - 1;
        double lo = grid_[j];
        double hi = grid_[k];
        while (hi - lo > opts_.abscissa_tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (unnormalized_[j] + partial(j, mid) < goal)
                lo = mid;
            else
                hi = mid;
        }
        return hi;
    }

private:
    double sample(double x) const {
        const double d = density_(x);
        if (!std::isfinite(d)) throw numerical_error("knot density is not finite");
        return d;
    }

    std::size_t panel_of(double x) const {
        auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - grid_.begin());
        return std::clamp<std::size_t>(k, 1, grid_.size() - 1) - 1;
    }

    double partial(std::size_t j, double x) const {
        if (x <= grid_[j]) return 0.0;
        return quad::integrate([this](double t) { return sample(t); }, grid_[j], x, 0.01 * panel_tol_, 0.0).value;
    }

    std::function<double(double)> density_;
    DistributionOptions opts_;
    std::vector<double> grid_;
    std::vector<double> unnormalized_;
    std::vector<double> cumulative_;
    double normalizer_ = 0.0;
    double panel_tol_ = 0.0;
};

inline Partition uniform_partition(double a, double b, std::size_t n) { return Partition::uniform(a, b, n); }

/// Unnormalized local knot density |f''(x)|^(1/3).
inline double knot_density(const TargetFunction& f, double x) {
    const double d2 = f.d2(x);
    if (!std::isfinite(d2)) throw numerical_error("second derivative is not finite");
    return std::cbrt(std::abs(d2));
}

inline KnotDistribution build_distribution(const TargetFunction& f, double a, double b, DistributionOptions opts = {}) {
    return KnotDistribution([f](double x) { return knot_density(f, x); }, a, b, opts);
}

/// Knots x_i = F^{-1}(i/N) with x_0 = a and x_N = b, nudged apart when a
/// steep density would collapse two of them.
inline Partition partition_from_distribution(const KnotDistribution& dist, std::size_t n) {
    if (n == 0) throw std::invalid_argument("partition requires N >= 1");
    const double a = dist.a();
    const double b = dist.b();
    std::vector<double> k(n + 1);
    k.front() = a;
    k.back() = b;
    for (std::size_t i = 1; i < n; ++i)
        k[i] = dist.inverse(static_cast<double>(i) / static_cast<double>(n));

    const double gap = 1e-12 * (b - a);
    for (std::size_t i = 1; i < n; ++i)
        if (k[i] - k[i - 1] < gap) k[i] = k[i - 1] + gap;
    for (std::size_t i = n; i-- > 1;)
        if (k[i + 1] - k[i] < gap) k[i] = k[i + 1] - gap;
    return Partition(std::move(k));
}

inline Partition optimized_partition(const TargetFunction& f, double a, double b, std::size_t n,
                                     DistributionOptions opts = {}) {
    if (n == 0) throw std::invalid_argument("partition requires N >= 1");
    return partition_from_distribution(build_distribution(f, a, b, opts), n);
}

} // namespace polylin
