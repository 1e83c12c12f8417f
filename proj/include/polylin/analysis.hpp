#pragma once

// L1 distances between a target and a polygonal function, the asymptotic
// error bounds, the segment-budget planner and the partition gain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polylin/core.hpp"
#include "polylin/errors.hpp"
#include "polylin/quadrature.hpp"

namespace polylin {

struct DistanceTolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-9;
};

/// int_lo^hi |f - line| where line is any callable; sign changes of the
/// difference become panel edges so |.| is smooth on every piece.
template <class F, class Line>
double segment_l1_distance(const F& f, const Line& line, double lo, double hi, double abs_tol, double rel_tol) {
    auto diff = [&](double x) { return f(x) - line(x); };
    const std::vector<double> breaks = quad::sign_change_breakpoints(diff, lo, hi, 16, 80);
    auto r = quad::integrate([&](double x) { return std::abs(diff(x)); }, std::span<const double>(breaks), abs_tol,
                             rel_tol, 2);
    if (!r.converged) throw numerical_error("L1 quadrature did not converge on [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "]");
    return r.value;
}

/// L1 distance on each subinterval I_1..I_N.
inline std::vector<double> per_interval_errors(const TargetFunction& f, const PolygonalFunction& g,
                                               DistanceTolerance tol = {}) {
    const Partition& p = g.partition();
    if (std::abs(p.a() - f.a) > 1e-12 * p.length() || std::abs(p.b() - f.b) > 1e-12 * p.length())
        throw std::invalid_argument("target and polygonal function must share one domain");
    const std::size_t n = p.segments();
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double lo = p.knot(i - 1);
        const double hi = p.knot(i);
        const double share = (hi - lo) / p.length();
        out[i - 1] = segment_l1_distance(
            f, [&](double x) { return g.piece(i, x); }, lo, hi, tol.abs_tol * share, tol.rel_tol);
    }
    return out;
}

inline double l1_distance(const TargetFunction& f, const PolygonalFunction& g, DistanceTolerance tol = {}) {
    const auto parts = per_interval_errors(f, g, tol);
    double s = 0.0;
    for (double e : parts) s += e;
    return s;
}

enum class BoundKind { uniform_interpolant, optimized_interpolant, uniform_best_l1, optimized_best_l1 };

inline std::string_view to_string(BoundKind k) {
    switch (k) {
    case BoundKind::uniform_interpolant: return "uniform_interpolant";
    case BoundKind::optimized_interpolant: return "optimized_interpolant";
    case BoundKind::uniform_best_l1: return "uniform_bestL1";
    case BoundKind::optimized_best_l1: return "optimized_bestL1";
    }
    return "unknown";
}

inline BoundKind bound_kind_from_string(std::string_view s) {
    for (auto k : {BoundKind::uniform_interpolant, BoundKind::optimized_interpolant, BoundKind::uniform_best_l1,
                   BoundKind::optimized_best_l1})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown bound kind: " + std::string(s));
}

inline bool is_best_l1(BoundKind k) { return k == BoundKind::uniform_best_l1 || k == BoundKind::optimized_best_l1; }
inline bool is_uniform(BoundKind k) { return k == BoundKind::uniform_interpolant || k == BoundKind::uniform_best_l1; }

/// Asymptotic L1 error estimate for one approximant/partition pairing.
struct BoundEstimate {
    double value = 0.0;
    BoundKind kind = BoundKind::uniform_interpolant;
    std::size_t n = 1;
    double a = 0.0;
    double b = 1.0;
};

/// Ratio of best-L1 to interpolant error on a segment where f'' is constant.
inline constexpr double best_l1_factor = 3.0 / 8.0;

/// Curvature integrals over [a, b] that every bound is built from.
struct CurvatureIntegrals {
    double abs_second = 0.0;     ///< int |f''|
    double density_mass = 0.0;   ///< int |f''|^(1/3)
    bool constant = false;       ///< |f''| took one value at every sample
};

inline CurvatureIntegrals curvature_integrals(const TargetFunction& f, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("interval requires a < b");
    auto d2 = [&](double x) {
        const double v = f.d2(x);
        if (!std::isfinite(v)) throw numerical_error("second derivative is not finite");
        return v;
    };
    CurvatureIntegrals c;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto r1 = quad::integrate(
        [&](double x) {
            const double v = std::abs(d2(x));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            return v;
        },
        a, b, 1e-300, 1e-12, 256);
    auto r2 = quad::integrate([&](double x) { return std::cbrt(std::abs(d2(x))); }, a, b, 1e-300, 1e-12, 256);
    if (!r1.converged || !r2.converged) throw numerical_error("curvature integral did not converge");
    c.abs_second = r1.value;
    c.density_mass = r2.value;
    c.constant = lo == hi;
    return c;
}

/// Bound value at N = 1; the value at N is this divided by N^2.
inline double bound_constant(const CurvatureIntegrals& c, double a, double b, BoundKind kind) {
    const double base = is_uniform(kind) ? (b - a) * (b - a) * c.abs_second / 12.0
                                         : c.density_mass * c.density_mass * c.density_mass / 12.0;
    return is_best_l1(kind) ? best_l1_factor * base : base;
}

inline BoundEstimate bound_estimate(const CurvatureIntegrals& c, double a, double b, std::size_t n, BoundKind kind) {
    if (n == 0) throw std::invalid_argument("bound requires N >= 1");
    const double nn = static_cast<double>(n);
    return BoundEstimate{bound_constant(c, a, b, kind) / (nn * nn), kind, n, a, b};
}

/// ((b - a)^2 / (12 N^2)) int_a^b |f''|.
inline BoundEstimate bound_uniform_interpolant(const TargetFunction& f, double a, double b, std::size_t n) {
    return bound_estimate(curvature_integrals(f, a, b), a, b, n, BoundKind::uniform_interpolant);
}

/// (1 / (12 N^2)) (int_a^b |f''|^(1/3))^3.
inline BoundEstimate bound_optimized_interpolant(const TargetFunction& f, double a, double b, std::size_t n) {
    return bound_estimate(curvature_integrals(f, a, b), a, b, n, BoundKind::optimized_interpolant);
}

inline BoundEstimate bound(const TargetFunction& f, double a, double b, std::size_t n, BoundKind kind) {
    return bound_estimate(curvature_integrals(f, a, b), a, b, n, kind);
}

/// Real-valued segment count at which the interpolant bound meets `tol`.
inline double interpolant_segments_real(const CurvatureIntegrals& c, double a, double b, double tol, bool uniform) {
    const auto kind = uniform ? BoundKind::uniform_interpolant : BoundKind::optimized_interpolant;
    return std::sqrt(bound_constant(c, a, b, kind) / tol);
}

/// Smallest N whose bound is within `tol`. Best-L1 kinds scale the real
/// interpolant count by sqrt(3/8) before rounding up.
inline std::size_t min_segments_for_tolerance(const CurvatureIntegrals& c, double a, double b, double tol,
                                              BoundKind kind) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    double n = interpolant_segments_real(c, a, b, tol, is_uniform(kind));
    if (is_best_l1(kind)) n *= std::sqrt(best_l1_factor);
    if (!(n > 0.0)) return 1;  // linear target
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(n)));
}

inline std::size_t min_segments_for_tolerance(const TargetFunction& f, double a, double b, double tol, BoundKind kind) {
    return min_segments_for_tolerance(curvature_integrals(f, a, b), a, b, tol, kind);
}

/// Uniform-partition bound over optimized-partition bound; independent of N.
/// Exactly 1 when |f''| is constant, the only case where the bounds coincide.
inline double partition_gain(const CurvatureIntegrals& c, double a, double b) {
    const double denom = c.density_mass * c.density_mass * c.density_mass;
    if (!(denom > 0.0)) throw numerical_error("partition gain undefined: f'' vanishes on the interval");
    if (c.constant) return 1.0;
    return (b - a) * (b - a) * c.abs_second / denom;
}

inline double partition_gain(const TargetFunction& f, double a, double b) {
    return partition_gain(curvature_integrals(f, a, b), a, b);
}

} // namespace polylin
