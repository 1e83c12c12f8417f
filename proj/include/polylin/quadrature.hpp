#pragma once

// Globally adaptive Simpson quadrature and sign-change bracketing.
//
// The integrator keeps every panel in a max-heap keyed on its Richardson error
// estimate and always splits the worst one, so a single cusp or kink cannot
// starve the rest of the interval of tolerance the way depth-halving
// recursion does.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "polylin/errors.hpp"

namespace polylin::quad {

/// Fixed-size value bundle so several integrands can share one set of nodes.
template <std::size_t N>
struct Bundle {
    std::array<double, N> v{};

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    Bundle& operator+=(const Bundle& o) {
        for (std::size_t i = 0; i < N; ++i) v[i] += o.v[i];
        return *this;
    }
    Bundle& operator-=(const Bundle& o) {
        for (std::size_t i = 0; i < N; ++i) v[i] -= o.v[i];
        return *this;
    }
    friend Bundle operator+(Bundle a, const Bundle& b) { return a += b; }
    friend Bundle operator-(Bundle a, const Bundle& b) { return a -= b; }
    friend Bundle operator*(Bundle a, double s) {
        for (auto& x : a.v) x *= s;
        return a;
    }
    friend Bundle operator*(double s, Bundle a) { return a * s; }
};

template <class Value>
struct Result {
    Value value{};
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

struct Limits {
    std::size_t max_panels = 400000;
};

namespace detail {

template <class Value>
struct Panel {
    double a, b;
    Value fa, fl, fm, fr, fb;
    Value estimate;
    double error;
};

template <class Value>
struct WorseFirst {
    bool operator()(const Panel<Value>& x, const Panel<Value>& y) const { return x.error < y.error; }
};

} // namespace detail

/// Integrates `f` over the consecutive pieces of `breaks`, each initially split
/// into `panels_per_piece` Simpson panels.
///
/// `measure(diff)` maps a Value difference to a nonnegative scalar and
/// `tolerance(total)` gives the admissible total error for the current total;
/// refinement stops once the summed panel errors fall below it.
template <class Value, class F, class Measure, class Tolerance>
Result<Value> integrate_adaptive(F&& f, std::span<const double> breaks, std::size_t panels_per_piece,
                                 Measure&& measure, Tolerance&& tolerance, Limits limits = {}) {
    using Panel = detail::Panel<Value>;
    Result<Value> out;
    if (breaks.size() < 2) return out;

    auto eval = [&](double x) {
        Value y = f(x);
        ++out.evaluations;
        if (!std::isfinite(measure(y))) throw numerical_error("integrand is not finite");
        return y;
    };

    auto finish = [&](double a, double b, const Value& fa, const Value& fm, const Value& fb) {
        const double m = 0.5 * (a + b);
        Panel p{a, b, fa, eval(0.5 * (a + m)), fm, eval(0.5 * (m + b)), fb, Value{}, 0.0};
        const double h = b - a;
        const Value whole = (fa + 4.0 * fm + fb) * (h / 6.0);
        const Value halves = (fa + 4.0 * p.fl + 2.0 * fm + 4.0 * p.fr + fb) * (h / 12.0);
        const Value diff = halves - whole;
        p.estimate = halves + diff * (1.0 / 15.0);
        p.error = measure(diff) / 15.0;
        return p;
    };

    std::vector<Panel> heap;
    std::vector<Panel> frozen;
    const detail::WorseFirst<Value> worse;
    const std::size_t per = std::max<std::size_t>(1, panels_per_piece);

    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double lo = breaks[k];
        const double hi = breaks[k + 1];
        if (!(hi > lo)) continue;
        Value left = eval(lo);
        for (std::size_t j = 0; j < per; ++j) {
            const double a = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(per);
            const double b = j + 1 == per ? hi : lo + (hi - lo) * static_cast<double>(j + 1) / static_cast<double>(per);
            Value mid = eval(0.5 * (a + b));
            Value right = eval(b);
            heap.push_back(finish(a, b, left, mid, right));
            left = right;
        }
    }

    std::make_heap(heap.begin(), heap.end(), worse);
    Value total{};
    double total_error = 0.0;
    for (const auto& q : heap) {
        total += q.estimate;
        total_error += q.error;
    }

    std::size_t panels = heap.size();
    while (!heap.empty() && total_error > tolerance(total)) {
        if (panels >= limits.max_panels) {
            out.converged = false;
            break;
        }
        std::pop_heap(heap.begin(), heap.end(), worse);
        Panel p = std::move(heap.back());
        heap.pop_back();
        const double m = 0.5 * (p.a + p.b);
        const double ulp_scale = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(p.a), std::abs(p.b));
        if (p.b - p.a <= ulp_scale) {
            // Cannot split further in double precision.
            frozen.push_back(p);
            continue;
        }
        Panel l = finish(p.a, m, p.fa, p.fl, p.fm);
        Panel r = finish(m, p.b, p.fm, p.fr, p.fb);
        total -= p.estimate;
        total += l.estimate;
        total += r.estimate;
        total_error += l.error + r.error - p.error;
        heap.push_back(std::move(l));
        std::push_heap(heap.begin(), heap.end(), worse);
        heap.push_back(std::move(r));
        std::push_heap(heap.begin(), heap.end(), worse);
        ++panels;
        // Running sums drift; re-anchor the error occasionally.
        if ((panels & 1023u) == 0) {
            total_error = 0.0;
            for (const auto& q : heap) total_error += q.error;
            for (const auto& q : frozen) total_error += q.error;
        }
    }

    out.value = Value{};
    out.error = 0.0;
    for (const auto& q : heap) {
        out.value += q.estimate;
        out.error += q.error;
    }
    for (const auto& q : frozen) {
        out.value += q.estimate;
        out.error += q.error;
    }
    if (out.error > tolerance(out.value)) out.converged = false;
    return out;
}

/// Scalar integral over [a, b] with a mixed absolute/relative stopping rule.
template <class F>
Result<double> integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                         std::size_t initial_panels = 1, Limits limits = {}) {
    const std::array<double, 2> breaks{a, b};
    return integrate_adaptive<double>(
        std::forward<F>(f), std::span<const double>(breaks), initial_panels,
        [](double d) { return std::abs(d); },
        [=](double total) { return std::max(abs_tol, rel_tol * std::abs(total)); }, limits);
}

/// Scalar integral over consecutive pieces of `breaks`.
template <class F>
Result<double> integrate(F&& f, std::span<const double> breaks, double abs_tol, double rel_tol,
                         std::size_t panels_per_piece = 1, Limits limits = {}) {
    return integrate_adaptive<double>(
        std::forward<F>(f), breaks, panels_per_piece, [](double d) { return std::abs(d); },
        [=](double total) { return std::max(abs_tol, rel_tol * std::abs(total)); }, limits);
}

/// Locates the sign changes of `g` on [a, b] by sampling it at `samples + 1`
/// equally spaced points and bisecting each bracket `iterations` times.
///
/// Returns the breakpoints {a, roots..., b}. Interior samples where g is exactly
/// zero are kept as breakpoints too. Pairs of roots closer than the sample
/// spacing can be missed; callers integrate |g| adaptively anyway.
template <class G>
std::vector<double> sign_change_breakpoints(G&& g, double a, double b, std::size_t samples = 16,
                                            int iterations = 60) {
    std::vector<double> out{a};
    const double step = (b - a) / static_cast<double>(samples);
    double x_prev = a;
    double g_prev = g(a);
    for (std::size_t j = 1; j <= samples; ++j) {
        const double x = j == samples ? b : a + step * static_cast<double>(j);
        const double gx = g(x);
        if (g_prev != 0.0 && gx != 0.0 && std::signbit(g_prev) != std::signbit(gx)) {
            double lo = x_prev, hi = x, glo = g_prev;
            for (int it = 0; it < iterations; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double gm = g(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(gm) == std::signbit(glo)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            if (root > out.back() && root < b) out.push_back(root);
        } else if (gx == 0.0 && j != samples && x > out.back()) {
            out.push_back(x);
        }
        x_prev = x;
        g_prev = gx;
    }
    out.push_back(b);
    return out;
}

} // namespace polylin::quad
