#pragma once

// Fast evaluation of polygonal functions.
//
// On a uniform partition the subinterval index is computed directly from
// floor(N (x - x_0) / (x_N - x_0)), so evaluation cost does not depend on N.
// Otherwise the index comes from a binary search over the knots.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "polylin/core.hpp"

namespace polylin {

enum class EvalMode { uniform_direct, binary_search };
enum class OutOfDomain { error, clamp };

inline std::string_view to_string(EvalMode m) {
    return m == EvalMode::uniform_direct ? "uniform_direct" : "binary_search";
}

struct BenchStats {
    std::size_t n_evals = 0;
    std::size_t repetitions = 0;
    double mean_ns = 0.0;  ///< mean per-evaluation time over repetitions
    double min_ns = 0.0;   ///< best repetition, per evaluation
    double checksum = 0.0;
};

class Evaluator {
public:
    /// Picks uniform_direct whenever the partition is uniform.
    explicit Evaluator(PolygonalFunction source, OutOfDomain policy = OutOfDomain::error)
        : Evaluator(source, source.partition().is_uniform() ? EvalMode::uniform_direct : EvalMode::binary_search,
                    policy) {}

    Evaluator(PolygonalFunction source, EvalMode mode, OutOfDomain policy = OutOfDomain::error)
        : source_(std::move(source)), mode_(mode), policy_(policy) {
        if (mode_ == EvalMode::uniform_direct && !source_.partition().is_uniform())
            throw std::invalid_argument("uniform_direct evaluation requires a uniform partition");
        const auto k = source_.partition().knots();
        knots_.assign(k.begin(), k.end());
        const auto v = source_.ordinates();
        values_.assign(v.begin(), v.end());
        n_ = knots_.size() - 1;
        x0_ = knots_.front();
        xn_ = knots_.back();
        scale_ = static_cast<double>(n_) / (xn_ - x0_);
    }

    const PolygonalFunction& source() const { return source_; }
    EvalMode mode() const { return mode_; }
    OutOfDomain out_of_domain() const { return policy_; }

    /// 0-based segment s with knots[s] <= x < knots[s + 1]; x_N maps to N - 1.
    std::size_t locate(double x) const {
        if (mode_ == EvalMode::uniform_direct) {
            const double t = (x - x0_) * scale_;
            std::size_t s = t <= 0.0 ? 0 : std::min(static_cast<std::size_t>(t), n_ - 1);
            // The floor can be one off after rounding; nudge to honor the knots exactly.
            if (x < knots_[s] && s > 0)
                --s;
            else if (s + 1 < n_ && x >= knots_[s + 1])
                ++s;
            return s;
        }
        auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
        return std::clamp<std::size_t>(i, 1, n_) - 1;
    }

    double evaluate(double x) const {
        if (!(x >= x0_ && x <= xn_)) {
            if (policy_ == OutOfDomain::error || std::isnan(x))
                throw std::domain_error("evaluation point outside the partition");
            x = std::clamp(x, x0_, xn_);
        }
        return interpolate(locate(x), x);
    }

    double operator()(double x) const { return evaluate(x); }

    std::vector<double> evaluate_batch(std::span<const double> xs) const {
        std::vector<double> out(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) out[j] = evaluate(xs[j]);
        return out;
    }

    /// Times `n_evals` evaluations at pre-generated pseudo-random points: one
    /// warm-up pass, then `repetitions` timed passes.
    BenchStats bench(std::size_t n_evals, std::uint64_t seed, std::size_t repetitions = 5) const {
        if (n_evals == 0) throw std::invalid_argument("bench requires at least one evaluation");
        repetitions = std::max<std::size_t>(repetitions, 1);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(x0_, xn_);
        std::vector<double> xs(n_evals);
        for (auto& x : xs) x = dist(rng);

        BenchStats stats;
        stats.n_evals = n_evals;
        stats.repetitions = repetitions;
        volatile double sink = 0.0;
        {
            double s = 0.0;
            for (double x : xs) s += evaluate(x);
            sink = s;
        }
        double total_ns = 0.0;
        double best_ns = std::numeric_limits<double>::infinity();
        double checksum = 0.0;
        for (std::size_t r = 0; r < repetitions; ++r) {
            double s = 0.0;
            const auto t0 = std::chrono::steady_clock::now();
            for (double x : xs) s += evaluate(x);
            const auto t1 = std::chrono::steady_clock::now();
            sink = s;
            checksum = s;
            const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
            total_ns += ns;
            best_ns = std::min(best_ns, ns);
        }
        (void)sink;
        const double per = static_cast<double>(n_evals);
        stats.mean_ns = total_ns / static_cast<double>(repetitions) / per;
        stats.min_ns = best_ns / per;
        stats.checksum = checksum;
        return stats;
    }

private:
    double interpolate(std::size_t s, double x) const {
        const double lo = knots_[s];
        const double d = (x - lo) / (knots_[s + 1] - lo);
        return (1.0 - d) * values_[s] + d * values_[s + 1];
    }

    PolygonalFunction source_;
    EvalMode mode_;
    OutOfDomain policy_;
    std::vector<double> knots_;
    std::vector<double> values_;
    std::size_t n_ = 1;
    double x0_ = 0.0;
    double xn_ = 1.0;
    double scale_ = 1.0;
};

} // namespace polylin
