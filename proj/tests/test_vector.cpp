#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "polylin/analysis.hpp"
#include "polylin/fit.hpp"
#include "polylin/functions.hpp"
#include "polylin/partition.hpp"
#include "polylin/vector.hpp"

using namespace polylin;

namespace {

TargetFunction square() { return polynomial({0.0, 0.0, 1.0}, 0.0, 1.0); }
TargetFunction cube() { return polynomial({0.0, 0.0, 0.0, 1.0}, 0.0, 1.0); }
TargetFunction zero() { return polynomial({0.0}, 0.0, 1.0); }

// Independent oracle: composite Simpson on a fine grid for G(x) = int_0^x (2 + 6t)^(1/3) dt,
// then bisection on G(x) = i/N * G(1).
double oracle_G(double x) {
    const int m = 20000;
    const double h = x / m;
    auto d = [](double t) { return std::cbrt(2.0 + 6.0 * t); };
    double s = d(0.0) + d(x);
    for (int j = 1; j < m; ++j) s += (j % 2 ? 4.0 : 2.0) * d(j * h);
    return s * h / 3.0;
}

double oracle_knot(double target) {
    double lo = 0.0, hi = 1.0;
    const double total = oracle_G(1.0);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (oracle_G(mid) < target * total ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST(VectorDensity, Examples) {
    const auto g = gaussian();
    EXPECT_DOUBLE_EQ(vector_knot_density(VectorTargetFunction({g}), 1.7), knot_density(g, 1.7));
    const auto neg = polynomial({0.0, 0.0, -1.0}, 0.0, 1.0);
    EXPECT_NEAR(vector_knot_density(VectorTargetFunction({square(), neg}), 0.3), std::cbrt(4.0), 1e-15);
    const auto l1 = polynomial({1.0, 2.0}, 0.0, 1.0);
    const auto l2 = polynomial({-1.0, 0.5}, 0.0, 1.0);
    EXPECT_EQ(vector_knot_density(VectorTargetFunction({l1, l2}), 0.5), 0.0);
    const TargetFunction bad([](double x) { return x; }, [](double) { return INFINITY; }, 0.0, 1.0);
    EXPECT_THROW(vector_knot_density(VectorTargetFunction({square(), bad}), 0.5), numerical_error);
}

TEST(VectorPartition, SingleComponentMatchesScalar) {
    const auto g = gaussian();
    const auto v = vector_optimized_partition(VectorTargetFunction({g}), 31);
    const auto s = optimized_partition(g, 0.0, 4.0, 31);
    for (std::size_t i = 0; i <= 31; ++i) EXPECT_NEAR(v.knot(i), s.knot(i), 1e-12);
}

TEST(VectorPartition, ZeroComponentAddsNothing) {
    const auto p = vector_optimized_partition(VectorTargetFunction({cube(), zero()}), 4);
    for (std::size_t i = 0; i <= 4; ++i) EXPECT_NEAR(p.knot(i), std::pow(i / 4.0, 0.75), 1e-9);
}

TEST(VectorPartition, SquareAndCubeMatchOracle) {
    const std::size_t n = 8;
    const auto p = vector_optimized_partition(VectorTargetFunction({square(), cube()}), n);
    for (std::size_t i = 1; i < n; ++i) EXPECT_NEAR(p.knot(i), oracle_knot(static_cast<double>(i) / n), 1e-9);
}

TEST(VectorPartition, AllLinearSignals) {
    EXPECT_THROW(vector_optimized_partition(VectorTargetFunction({zero(), polynomial({1.0, 1.0}, 0.0, 1.0)}), 4),
                 linear_function_error);
}

TEST(VectorDistance, Examples) {
    const auto p = uniform_partition(0.0, 1.0, 1);
    const VectorTargetFunction F({square(), cube()});
    EXPECT_NEAR(vector_l1_distance(F, vector_interpolant(F, p)), 5.0 / 12.0, 1e-10);

    const PolygonalFunction g(Partition(std::vector<double>{0.0, 0.5, 1.0}), {0.0, 2.0, 1.0});
    const VectorTargetFunction exact({as_target(g), as_target(g)});
    EXPECT_NEAR(vector_l1_distance(exact, vector_interpolant(exact, g.partition())), 0.0, 1e-12);

    const auto ga = gaussian();
    const auto q = uniform_partition(0.0, 4.0, 15);
    const VectorTargetFunction twice({ga, ga});
    EXPECT_DOUBLE_EQ(vector_l1_distance(twice, vector_interpolant(twice, q)), 2.0 * l1_distance(ga, interpolant(ga, q)));
}

TEST(VectorDistance, Mismatch) {
    const VectorTargetFunction F({square(), cube()});
    const auto g = vector_interpolant(F, uniform_partition(0.0, 1.0, 2));
    EXPECT_THROW(vector_l1_distance(F, VectorPolygonal{g.front()}), std::invalid_argument);
    const VectorPolygonal mixed{g.front(), interpolant(cube(), uniform_partition(0.0, 1.0, 3))};
    EXPECT_THROW(vector_l1_distance(F, mixed), std::invalid_argument);
}

TEST(VectorBound, SingleComponentMatchesScalar) {
    const auto g = gaussian();
    for (auto k : {BoundKind::uniform_interpolant, BoundKind::optimized_best_l1})
        EXPECT_NEAR(vector_bound(VectorTargetFunction({g}), 63, k).value, bound(g, 0.0, 4.0, 63, k).value,
                    1e-10 * bound(g, 0.0, 4.0, 63, k).value);
}

// Properties

TEST(VectorProperty, AdditivityAgainstComponentQuadrature) {
    const VectorTargetFunction F({gaussian(), chirp(0.0, 4.0), poly7(0.0, 4.0)});
    const auto p = vector_optimized_partition(F, 40);
    const auto G = vector_interpolant(F, p);
    double oracle = 0.0;
    for (std::size_t j = 0; j < F.size(); ++j) {
        // Plain composite midpoint with many points per segment.
        const auto& f = F.components[j];
        for (std::size_t i = 1; i <= p.segments(); ++i) {
            const double lo = p.knot(i - 1), hi = p.knot(i);
            const int m = 4000;
            double s = 0.0;
            for (int r = 0; r < m; ++r) {
                const double x = lo + (hi - lo) * (r + 0.5) / m;
                s += std::abs(f(x) - G[j].piece(i, x));
            }
            oracle += s * (hi - lo) / m;
        }
    }
    EXPECT_NEAR(vector_l1_distance(F, G), oracle, 1e-6 * oracle);
}

TEST(VectorProperty, PermutationInvariance) {
    const auto a = gaussian();
    const auto b = chirp(0.0, 4.0);
    const auto c = polynomial({0.0, 0.0, 0.0, 0.1}, 0.0, 4.0);
    const auto p1 = vector_optimized_partition(VectorTargetFunction({a, b, c}), 50);
    const auto p2 = vector_optimized_partition(VectorTargetFunction({c, a, b}), 50);
    const auto p3 = vector_optimized_partition(VectorTargetFunction({b, c, a}), 50);
    for (std::size_t i = 0; i <= 50; ++i) {
        EXPECT_NEAR(p1.knot(i), p2.knot(i), 1e-12);
        EXPECT_NEAR(p1.knot(i), p3.knot(i), 1e-12);
    }
}

TEST(VectorProperty, ThreeEighthsPersists) {
    const auto shifted = TargetFunction([](double x) { return std::exp(-0.5 * (x - 2.0) * (x - 2.0)); },
                                        [](double x) {
                                            const double y = x - 2.0;
                                            return (y * y - 1.0) * std::exp(-0.5 * y * y);
                                        },
                                        0.0, 4.0);
    const VectorTargetFunction F({gaussian(), shifted});
    const auto p = vector_optimized_partition(F, 255);
    const auto fit = vector_best_l1_fit(F, p);
    for (const auto& r : fit.reports) EXPECT_TRUE(r.converged);
    const double ratio = vector_l1_distance(F, fit.fit) / vector_l1_distance(F, vector_interpolant(F, p));
    EXPECT_NEAR(ratio, 3.0 / 8.0, 0.1 * 3.0 / 8.0);
}
