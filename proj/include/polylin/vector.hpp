#pragma once

// Vector-valued targets on one shared domain. The knot density uses the
// 1-norm of the stacked second derivatives; given a partition, every
// component is fitted on its own, concurrently.

#include <cmath>
#include <cstddef>
#include <future>
#include <stdexcept>
#include <vector>

#include "polylin/analysis.hpp"
#include "polylin/core.hpp"
#include "polylin/fit.hpp"
#include "polylin/partition.hpp"

namespace polylin {

/// One polygonal function per component, all on the same partition.
using VectorPolygonal = std::vector<PolygonalFunction>;

/// (sum_j |f_j''(x)|)^(1/3).
inline double vector_knot_density(const VectorTargetFunction& F, double x) {
    double s = 0.0;
    for (const auto& f : F.components) {
        const double d2 = f.d2(x);
        if (!std::isfinite(d2)) throw numerical_error("component second derivative is not finite");
        s += std::abs(d2);
    }
    return std::cbrt(s);
}

inline KnotDistribution build_vector_distribution(const VectorTargetFunction& F, DistributionOptions opts = {}) {
    return KnotDistribution([F](double x) { return vector_knot_density(F, x); }, F.a(), F.b(), opts);
}

inline Partition vector_optimized_partition(const VectorTargetFunction& F, std::size_t n,
                                            DistributionOptions opts = {}) {
    if (n == 0) throw std::invalid_argument("partition requires N >= 1");
    return partition_from_distribution(build_vector_distribution(F, opts), n);
}

inline VectorPolygonal vector_interpolant(const VectorTargetFunction& F, const Partition& p) {
    VectorPolygonal out;
    out.reserve(F.size());
    for (const auto& f : F.components) out.push_back(interpolant(f, p));
    return out;
}

struct VectorBestL1Fit {
    VectorPolygonal fit;
    std::vector<FitReport> reports;
};

inline VectorBestL1Fit vector_best_l1_fit(const VectorTargetFunction& F, const Partition& p, const FitOptions& opts = {}) {
    std::vector<std::future<BestL1Fit>> jobs;
    jobs.reserve(F.size());
    for (const auto& f : F.components)
        jobs.push_back(std::async(std::launch::async, [&f, &p, &opts] { return best_l1_fit(f, p, opts); }));
    VectorBestL1Fit out;
    for (auto& j : jobs) {
        auto r = j.get();
        out.fit.push_back(std::move(r.fit));
        out.reports.push_back(std::move(r.report));
    }
    return out;
}

/// sum_j ||f_j - g_j||_L1.
inline double vector_l1_distance(const VectorTargetFunction& F, const VectorPolygonal& G, DistanceTolerance tol = {}) {
    if (G.size() != F.size()) throw std::invalid_argument("vector distance: component count mismatch");
    for (const auto& g : G)
        if (!(g.partition() == G.front().partition()))
            throw std::invalid_argument("vector distance: components must share one partition");
    double s = 0.0;
    for (std::size_t j = 0; j < F.size(); ++j) s += l1_distance(F.components[j], G[j], tol);
    return s;
}

/// Uniform-partition bound with |f''| replaced by the 1-norm over components. Heuristic.
inline BoundEstimate vector_bound(const VectorTargetFunction& F, std::size_t n, BoundKind kind) {
    const double a = F.a();
    const double b = F.b();
    auto r1 = quad::integrate(
        [&](double x) {
            const double d = vector_knot_density(F, x);
            return d * d * d;
        },
        a, b, 1e-300, 1e-12, 256);
    auto r2 = quad::integrate([&](double x) { return vector_knot_density(F, x); }, a, b, 1e-300, 1e-12, 256);
    if (!r1.converged || !r2.converged) throw numerical_error("vector curvature integral did not converge");
    return bound_estimate(CurvatureIntegrals{r1.value, r2.value}, a, b, n, kind);
}

} // namespace polylin
