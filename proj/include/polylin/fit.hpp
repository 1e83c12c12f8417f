#pragma once

// Polygonal approximants on a fixed partition: interpolant, L2 projection and
// the best L1 fit.
//
// The best L1 fit minimizes sum_i int_{I_i} |f - v| over the nodal ordinates.
// |e| is replaced by log(cosh(k e)) / k, whose derivative is tanh(k e), and k is
// raised through a continuation schedule. Each stage runs damped Newton on the
// tridiagonal Hessian, warm-started from the previous stage; the first stage
// starts at the L2 projection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polylin/analysis.hpp"
#include "polylin/core.hpp"
#include "polylin/errors.hpp"
#include "polylin/quadrature.hpp"
#include "polylin/tridiagonal.hpp"

namespace polylin {

struct FitOptions {
    /// When positive, a single stage with this absolute k replaces the schedule.
    double smoothing_k = 0.0;
    /// Continuation multipliers; stage k = multiplier * N / (b - a).
    std::vector<double> k_schedule{1e2, 1e3, 1e4, 1e5};
    double param_tol = 1e-16;
    double cost_tol = 1e-10;
    std::size_t max_newton_iters = 50;
    /// Total absolute quadrature tolerance for the smoothed cost.
    double quadrature_tol = 1e-12;
};

struct FitReport {
    std::size_t iterations = 0;
    /// True L1 distance of the returned fit.
    double final_cost = 0.0;
    /// Smoothed cost at the last k.
    double smoothed_cost = 0.0;
    double final_gradient_norm = 0.0;
    bool converged = false;
    std::size_t function_evals = 0;
    std::vector<std::size_t> stage_function_evals;
    std::vector<double> stage_k;
};

inline PolygonalFunction interpolant(const TargetFunction& f, const Partition& p) { return from_samples(p, f); }

// ---------------------------------------------------------------------------
// L2 projection
// ---------------------------------------------------------------------------

struct LinearSystem {
    TridiagonalMatrix matrix;
    std::vector<double> rhs;
};

/// Gramian m_ij = <phi_i, phi_j> and load b_i = <f, phi_i>.
inline LinearSystem assemble_l2_system(const TargetFunction& f, const Partition& p, double quadrature_tol = 1e-12) {
    const std::size_t n = p.segments();
    LinearSystem sys{TridiagonalMatrix(n + 1), std::vector<double>(n + 1, 0.0)};
    for (std::size_t i = 1; i <= n; ++i) {
        const double lo = p.knot(i - 1);
        const double hi = p.knot(i);
        const double h = hi - lo;
        sys.matrix.diag[i - 1] += h / 3.0;
        sys.matrix.diag[i] += h / 3.0;
        sys.matrix.upper[i - 1] = h / 6.0;
        sys.matrix.lower[i - 1] = h / 6.0;

        using B2 = quad::Bundle<2>;
        auto integrand = [&](double x) {
            const double t = (x - lo) / h;
            const double fx = f(x);
            return B2{{fx * (1.0 - t), fx * t}};
        };
        const double tol = quadrature_tol * h / p.length();
        const std::array<double, 2> br{lo, hi};
        auto r = quad::integrate_adaptive<B2>(
            integrand, std::span<const double>(br), 4,
            [](const B2& d) { return std::max(std::abs(d[0]), std::abs(d[1])); },
            [tol](const B2& total) {
                return std::max(tol, 1e-14 * std::max(std::abs(total[0]), std::abs(total[1])));
            });
        if (!r.converged) throw numerical_error("quadrature failed while assembling the L2 load vector");
        sys.rhs[i - 1] += r.value[0];
        sys.rhs[i] += r.value[1];
    }
    return sys;
}

/// Best L2 approximation in V_T (orthogonal projection), via the Thomas algorithm.
inline PolygonalFunction l2_projection(const TargetFunction& f, const Partition& p, double quadrature_tol = 1e-12) {
    auto sys = assemble_l2_system(f, p, quadrature_tol);
    auto c = thomas_solve(sys.matrix, sys.rhs);
    if (!c) throw numerical_error("Gram system is singular");
    return PolygonalFunction(p, std::move(*c));
}

// ---------------------------------------------------------------------------
// Smoothed L1 cost
// ---------------------------------------------------------------------------

/// log(cosh(z)) without overflow.
inline double log_cosh(double z) {
    const double a = std::abs(z);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

/// cost_k(v) = sum_i int_{I_i} log(cosh(k (f - v))) / k, with its gradient and
/// tridiagonal Hessian in the nodal ordinates.
class SmoothedL1Cost {
public:
    struct Evaluation {
        double cost = 0.0;
        std::vector<double> gradient;
        TridiagonalMatrix hessian;
    };

    SmoothedL1Cost(TargetFunction f, Partition p, double quadrature_tol = 1e-12, double gradient_tol = 1e-12)
        : f_(std::move(f)), p_(std::move(p)), quadrature_tol_(quadrature_tol), gradient_tol_(gradient_tol) {}

    const Partition& partition() const { return p_; }

    Evaluation evaluate(std::span<const double> v, double k) const {
        const std::size_t n = p_.segments();
        if (v.size() != n + 1) throw std::invalid_argument("coefficient vector has the wrong length");
        if (!(k > 0.0)) throw std::invalid_argument("smoothing k must be positive");
        Evaluation e{0.0, std::vector<double>(n + 1, 0.0), TridiagonalMatrix(n + 1)};
        for (std::size_t i = 1; i <= n; ++i) {
            const auto s = segment(i, v[i - 1], v[i], k);
            e.cost += s[0];
            e.gradient[i - 1] += s[1];
            e.gradient[i] += s[2];
            e.hessian.diag[i - 1] += s[3];
            e.hessian.upper[i - 1] += s[4];
            e.hessian.lower[i - 1] += s[4];
            e.hessian.diag[i] += s[5];
        }
        if (!std::isfinite(e.cost)) throw numerical_error("smoothed cost is not finite");
        return e;
    }

    double cost(std::span<const double> v, double k) const { return evaluate(v, k).cost; }

private:
    using B6 = quad::Bundle<6>;

    // {cost, dC/dv_lo, dC/dv_hi, H_lo_lo, H_lo_hi, H_hi_hi} for one segment.
    B6 segment(std::size_t i, double v_lo, double v_hi, double k) const {
        const double lo = p_.knot(i - 1);
        const double hi = p_.knot(i);
        const double h = hi - lo;
        auto residual = [&](double x) {
            const double t = (x - lo) / h;
            return f_(x) - ((1.0 - t) * v_lo + t * v_hi);
        };
        auto integrand = [&](double x) {
            const double t = (x - lo) / h;
            const double e = f_(x) - ((1.0 - t) * v_lo + t * v_hi);
            const double z = k * e;
            const double th = std::tanh(z);
            const double sech2 = 1.0 - th * th;
            const double w = k * sech2;
            return B6{{log_cosh(z) / k, -th * (1.0 - t), -th * t, w * (1.0 - t) * (1.0 - t), w * (1.0 - t) * t, w * t * t}};
        };
        const auto breaks = quad::sign_change_breakpoints(residual, lo, hi, 16, 40);
        const double cost_tol = quadrature_tol_ * h / p_.length();
        const double grad_tol = gradient_tol_;
        auto r = quad::integrate_adaptive<B6>(
            integrand, std::span<const double>(breaks), 2,
            [=](const B6& d) {
                return std::max({std::abs(d[0]) / cost_tol, std::abs(d[1]) / grad_tol, std::abs(d[2]) / grad_tol});
            },
            [](const B6&) { return 1.0; });
        return r.value;
    }

    TargetFunction f_;
    Partition p_;
    double quadrature_tol_;
    double gradient_tol_;
};

// ---------------------------------------------------------------------------
// Best L1 fit
// ---------------------------------------------------------------------------

namespace detail {

inline double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace detail

/// Effective k values for a partition under the given options.
inline std::vector<double> smoothing_stages(const FitOptions& opts, const Partition& p) {
    if (opts.smoothing_k > 0.0) return {opts.smoothing_k};
    const double scale = static_cast<double>(p.segments()) / p.length();
    std::vector<double> ks;
    for (double m : opts.k_schedule) {
        if (!(m > 0.0)) throw std::invalid_argument("smoothing values must be positive");
        if (!ks.empty() && !(m * scale > ks.back())) throw std::invalid_argument("smoothing schedule must increase");
        ks.push_back(m * scale);
    }
    if (ks.empty()) throw std::invalid_argument("smoothing schedule is empty");
    return ks;
}

struct BestL1Fit {
    PolygonalFunction fit;
    FitReport report;
};

/// Best L1 polygonal approximation on partition `p`.
///
/// Newton steps solve (H + lambda I) s = -g with lambda starting at
/// 1e-12 ||H||_inf and doubling until s is a descent direction, then halve the
/// step until the smoothed cost drops. A stage ends when ||g||_inf <= cost_tol
/// or the step is below param_tol; intermediate stages also stop once the
/// relative cost decrease is below cost_tol. Non-convergence within
/// max_newton_iters is reported, not thrown.
inline BestL1Fit best_l1_fit(const TargetFunction& f, const Partition& p, const FitOptions& opts = {}) {
    if (!(opts.cost_tol > 0.0) || !(opts.param_tol > 0.0) || !(opts.quadrature_tol > 0.0))
        throw std::invalid_argument("fit tolerances must be positive");
    const auto stages = smoothing_stages(opts, p);
    const SmoothedL1Cost objective(f, p, opts.quadrature_tol, 0.01 * opts.cost_tol);

    const PolygonalFunction start = l2_projection(f, p, opts.quadrature_tol);
    std::vector<double> v(start.ordinates().begin(), start.ordinates().end());

    FitReport report;
    bool last_stage_converged = false;
    SmoothedL1Cost::Evaluation current;

    for (std::size_t stage = 0; stage < stages.size(); ++stage) {
        const double k = stages[stage];
        const bool final_stage = stage + 1 == stages.size();
        std::size_t evals = 0;
        current = objective.evaluate(v, k);
        ++evals;
        bool stage_done = false;
        for (std::size_t it = 0; it < opts.max_newton_iters; ++it) {
            if (detail::max_abs(current.gradient) <= opts.cost_tol) {
                stage_done = true;
                break;
            }
            std::vector<double> neg_g(current.gradient.size());
            for (std::size_t j = 0; j < neg_g.size(); ++j) neg_g[j] = -current.gradient[j];

            const double hnorm = current.hessian.norm_inf();
            double lambda = 1e-12 * (hnorm > 0.0 ? hnorm : 1.0);
            std::optional<std::vector<double>> step;
            for (int tries = 0; tries < 200; ++tries) {
                step = thomas_solve(current.hessian, neg_g, lambda);
                if (step && detail::dot(*step, current.gradient) < 0.0) break;
                step.reset();
                lambda *= 2.0;
            }
            if (!step) throw numerical_error("no descent direction for the smoothed L1 cost");

            const double slope = detail::dot(*step, current.gradient);
            double t = 1.0;
            bool accepted = false;
            SmoothedL1Cost::Evaluation trial;
            std::vector<double> candidate(v.size());
            for (int halvings = 0; halvings < 40; ++halvings) {
                for (std::size_t j = 0; j < v.size(); ++j) candidate[j] = v[j] + t * (*step)[j];
                trial = objective.evaluate(candidate, k);
                ++evals;
                const bool sufficient = trial.cost <= current.cost + 1e-4 * t * slope;
                // Near the optimum the decrease drops below quadrature noise; fall back to the gradient.
                const bool within_noise = trial.cost <= current.cost + opts.quadrature_tol &&
                                          detail::max_abs(trial.gradient) < detail::max_abs(current.gradient);
                if (sufficient || within_noise) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            ++report.iterations;
            if (!accepted) {
                // No representable decrease: the iterate sits at the quadrature noise floor.
                stage_done = true;
                break;
            }
            const double decrease = current.cost - trial.cost;
            const double moved = t * detail::max_abs(*step);
            v = candidate;
            current = std::move(trial);
            const bool stalled = !final_stage && decrease <= opts.cost_tol * std::abs(current.cost);
            if (moved <= opts.param_tol || stalled || detail::max_abs(current.gradient) <= opts.cost_tol) {
                stage_done = true;
                break;
            }
        }
        report.function_evals += evals;
        report.stage_function_evals.push_back(evals);
        report.stage_k.push_back(k);
        last_stage_converged = stage_done;
    }

    PolygonalFunction fit(p, std::move(v));
    report.smoothed_cost = current.cost;
    report.final_gradient_norm = detail::max_abs(current.gradient);
    report.converged = last_stage_converged;
    report.final_cost = l1_distance(f, fit);
    if (!std::isfinite(report.final_cost)) throw numerical_error("L1 cost of the fit is not finite");
    return BestL1Fit{std::move(fit), std::move(report)};
}

// ---------------------------------------------------------------------------
// Single-segment optimum
// ---------------------------------------------------------------------------

struct SegmentFit {
    double dy_lo = 0.0;  ///< line(x_lo) - f(x_lo)
    double dy_hi = 0.0;  ///< line(x_hi) - f(x_hi)
    double min_error = 0.0;
    double slope = 0.0;
    double intercept = 0.0;  ///< line(x) = intercept + slope * x

    double operator()(double x) const { return intercept + slope * x; }
};

/// Best L1 line on [lo, hi]: the line through f at the canonical points
/// lo + h/4 and lo + 3h/4.
inline SegmentFit best_l1_segment(const TargetFunction& f, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("best_l1_segment: degenerate interval");
    const double h = hi - lo;
    const double x1 = lo + 0.25 * h;
    const double x2 = lo + 0.75 * h;
    const double f1 = f(x1);
    const double f2 = f(x2);
    SegmentFit s;
    s.slope = (f2 - f1) / (x2 - x1);
    s.intercept = f1 - s.slope * x1;
    s.dy_lo = (f1 + s.slope * (lo - x1)) - f(lo);
    s.dy_hi = (f1 + s.slope * (hi - x1)) - f(hi);
    s.min_error = segment_l1_distance(
        f, [&](double x) { return f1 + s.slope * (x - x1); }, lo, hi, 1e-14 * h, 1e-12);
    return s;
}

} // namespace polylin
