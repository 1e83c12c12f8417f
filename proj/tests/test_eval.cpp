#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "polylin/eval.hpp"
#include "polylin/fit.hpp"
#include "polylin/functions.hpp"
#include "polylin/partition.hpp"

using namespace polylin;

namespace {

PolygonalFunction gaussian_interp(const Partition& p) { return interpolant(gaussian(p.a(), p.b()), p); }

std::size_t linear_scan(std::span<const double> k, double x) {
    const std::size_t n = k.size() - 1;
    if (x == k[n]) return n - 1;
    for (std::size_t s = 0; s < n; ++s)
        if (k[s] <= x && x < k[s + 1]) return s;
    return n;
}

} // namespace

TEST(Evaluator, ModeSelection) {
    EXPECT_EQ(Evaluator(gaussian_interp(uniform_partition(0.0, 4.0, 31))).mode(), EvalMode::uniform_direct);
    const auto opt = gaussian_interp(optimized_partition(gaussian(), 0.0, 4.0, 31));
    EXPECT_EQ(Evaluator(opt).mode(), EvalMode::binary_search);
    EXPECT_THROW(Evaluator(opt, EvalMode::uniform_direct), std::invalid_argument);
}

TEST(Evaluator, LinearityExample) {
    const PolygonalFunction g(uniform_partition(0.0, 1.0, 2), {0.0, 1.0, 0.0});
    for (auto mode : {EvalMode::uniform_direct, EvalMode::binary_search}) {
        const Evaluator e(g, mode);
        EXPECT_DOUBLE_EQ(e(0.25), 0.5);
        EXPECT_EQ(e(0.5), 1.0);
        EXPECT_EQ(e(1.0), 0.0);
    }
}

TEST(Evaluator, OutOfDomain) {
    const auto g = gaussian_interp(uniform_partition(0.0, 4.0, 8));
    const Evaluator strict(g);
    EXPECT_THROW(strict(-0.1), std::domain_error);
    EXPECT_THROW(strict(4.1), std::domain_error);
    EXPECT_THROW(strict(NAN), std::domain_error);
    const Evaluator clamp(g, OutOfDomain::clamp);
    EXPECT_EQ(clamp(-3.0), g.ordinate(0));
    EXPECT_EQ(clamp(9.0), g.ordinate(8));
}

TEST(Evaluator, BatchEdgeCases) {
    const auto g = gaussian_interp(uniform_partition(0.0, 4.0, 16));
    const Evaluator e(g);
    EXPECT_TRUE(e.evaluate_batch(std::vector<double>{}).empty());
    const auto k = g.partition().knots();
    const auto v = e.evaluate_batch(k);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], g.ordinate(i));
    EXPECT_THROW(e.evaluate_batch(std::vector<double>{1.0, 5.0}), std::domain_error);
}

TEST(Evaluator, BatchMatchesLoop) {
    const Evaluator e(gaussian_interp(optimized_partition(gaussian(), 0.0, 4.0, 127)));
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    std::vector<double> xs(1000000);
    for (auto& x : xs) x = u(rng);
    const auto out = e.evaluate_batch(xs);
    for (std::size_t j = 0; j < xs.size(); ++j) ASSERT_EQ(out[j], e.evaluate(xs[j]));
}

TEST(Evaluator, BenchChecksumDeterministic) {
    const Evaluator e(gaussian_interp(uniform_partition(0.0, 4.0, 63)));
    const auto a = e.bench(100000, 42);
    const auto b = e.bench(100000, 42);
    EXPECT_EQ(a.checksum, b.checksum);
    EXPECT_EQ(a.n_evals, 100000u);
    EXPECT_EQ(a.repetitions, 5u);
    EXPECT_GT(a.mean_ns, 0.0);
    EXPECT_LE(a.min_ns, a.mean_ns);
    EXPECT_NE(e.bench(100000, 43).checksum, a.checksum);
}

// Properties

TEST(EvaluatorProperty, KnotExactness) {
    std::mt19937_64 rng(1);
    for (std::size_t n : {1u, 7u, 31u, 63u, 127u, 255u, 511u}) {
        for (auto [a, b] : {std::pair{0.0, 4.0}, std::pair{-3.3, 0.1}, std::pair{1e3, 1e3 + 7.0}}) {
            const auto p = uniform_partition(a, b, n);
            std::vector<double> v(n + 1);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            for (auto& y : v) y = u(rng);
            const PolygonalFunction g(p, v);
            for (auto mode : {EvalMode::uniform_direct, EvalMode::binary_search}) {
                const Evaluator e(g, mode);
                for (std::size_t i = 0; i <= n; ++i) ASSERT_EQ(e(p.knot(i)), v[i]) << "N=" << n << " i=" << i;
            }
        }
    }
}

TEST(EvaluatorProperty, ModeEquivalence) {
    std::mt19937_64 rng(17);
    for (std::size_t n : {31u, 63u, 127u, 255u, 511u}) {
        const auto g = gaussian_interp(uniform_partition(0.0, 4.0, n));
        const Evaluator direct(g, EvalMode::uniform_direct);
        const Evaluator search(g, EvalMode::binary_search);
        std::uniform_real_distribution<double> u(0.0, 4.0);
        for (int j = 0; j < 10000; ++j) {
            const double x = u(rng);
            const double d = direct(x);
            ASSERT_NEAR(d, search(x), 1e-12 * std::abs(d)) << "x=" << x;
        }
    }
}

TEST(EvaluatorProperty, LocateMatchesLinearScan) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        const bool uniform = trial % 2 == 0;
        std::vector<double> k{0.0};
        for (std::size_t i = 0; i < n; ++i) k.push_back(uniform ? (i + 1.0) / n : k.back() + 0.01 + u(rng));
        const Partition p(k);
        const Evaluator e(PolygonalFunction(p, std::vector<double>(n + 1, 0.0)));
        const double x = trial % 5 == 0 ? p.knot(rng() % (n + 1)) : p.a() + u(rng) * p.length();
        const std::size_t s = e.locate(x);
        EXPECT_EQ(s, linear_scan(p.knots(), x)) << "trial " << trial;
        EXPECT_LE(p.knot(s), x);
        EXPECT_TRUE(x < p.knot(s + 1) || (x == p.b() && s + 1 == n));
    }
}

TEST(EvaluatorProperty, Continuity) {
    const auto g = gaussian_interp(optimized_partition(gaussian(), 0.0, 4.0, 63));
    const Evaluator e(g);
    const auto k = g.partition().knots();
    const double eps = 1e-9;
    for (std::size_t i = 1; i + 1 < k.size(); ++i) {
        const double sl = (g.ordinate(i) - g.ordinate(i - 1)) / (k[i] - k[i - 1]);
        const double sr = (g.ordinate(i + 1) - g.ordinate(i)) / (k[i + 1] - k[i]);
        const double jump = std::abs(e(k[i] + eps) - e(k[i] - eps));
        EXPECT_LE(jump, (std::abs(sl) + std::abs(sr)) * eps * (1.0 + 1e-6) + 1e-15);
    }
}
