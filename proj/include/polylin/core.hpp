#pragma once

// Partitions, polygonal (continuous piecewise-linear) functions and the hat basis.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polylin {

/// Ordered knots a = x_0 < x_1 < ... < x_N = b splitting [a, b] into N subintervals.
class Partition {
public:
    explicit Partition(std::vector<double> knots) : knots_(std::move(knots)) {
        if (knots_.size() < 2) throw std::invalid_argument("partition needs at least two knots");
        for (double x : knots_)
            if (!std::isfinite(x)) throw std::invalid_argument("partition knots must be finite");
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (!(knots_[i - 1] < knots_[i])) throw std::invalid_argument("partition knots must be strictly increasing");
        const double span = b() - a();
        const double h = span / static_cast<double>(segments());
        uniform_ = true;
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (std::abs((knots_[i] - knots_[i - 1]) - h) > 1e-12 * span) {
                uniform_ = false;
                break;
            }
        }
    }

    /// x_i = a + i (b - a) / N.
    static Partition uniform(double a, double b, std::size_t n) {
        if (!(a < b)) throw std::invalid_argument("uniform partition requires a < b");
        if (n == 0) throw std::invalid_argument("uniform partition requires N >= 1");
        std::vector<double> k(n + 1);
        const double h = (b - a) / static_cast<double>(n);
        for (std::size_t i = 0; i <= n; ++i) k[i] = a + static_cast<double>(i) * h;
        k[n] = b;
        return Partition(std::move(k));
    }

    std::span<const double> knots() const { return knots_; }
    double knot(std::size_t i) const { return knots_.at(i); }
    std::size_t segments() const { return knots_.size() - 1; }
    double a() const { return knots_.front(); }
    double b() const { return knots_.back(); }
    double length() const { return b() - a(); }
    /// h_i = x_i - x_{i-1}, for 1 <= i <= N.
    double width(std::size_t i) const { return knots_.at(i) - knots_.at(i - 1); }
    bool is_uniform() const { return uniform_; }
    bool contains(double x) const { return x >= a() && x <= b(); }

    /// Index i of the subinterval [x_{i-1}, x_i) holding x (1-based, as in I_i);
    /// x = x_N maps to N.
    std::size_t interval_of(double x) const {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - knots_.begin());
        return std::clamp<std::size_t>(i, 1, segments());
    }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<double> knots_;
    bool uniform_ = false;
};

/// Element of V_T: v(x) = sum_i v_i phi_i(x).
class PolygonalFunction {
public:
    PolygonalFunction(Partition partition, std::vector<double> ordinates)
        : partition_(std::move(partition)), ordinates_(std::move(ordinates)) {
        if (ordinates_.size() != partition_.knots().size())
            throw std::invalid_argument("ordinate count must equal knot count");
    }

    const Partition& partition() const { return partition_; }
    std::span<const double> ordinates() const { return ordinates_; }
    double ordinate(std::size_t i) const { return ordinates_.at(i); }

    /// Value of the linear piece on I_i (1-based) at x; x need not lie in I_i.
    double piece(std::size_t i, double x) const {
        const double lo = partition_.knot(i - 1);
        const double hi = partition_.knot(i);
        const double d = (x - lo) / (hi - lo);
        return (1.0 - d) * ordinates_[i - 1] + d * ordinates_[i];
    }

    double operator()(double x) const {
        if (!partition_.contains(x)) throw std::domain_error("polygonal function evaluated outside its domain");
        return piece(partition_.interval_of(x), x);
    }

private:
    Partition partition_;
    std::vector<double> ordinates_;
};

enum class Derivative { analytic, numeric };

/// Central second difference with a roundoff floor; the stencil is moved inward
/// so it never leaves [lo, hi].
inline double numeric_second_derivative(const std::function<double(double)>& f, double x, double lo, double hi) {
    const double delta = std::max(1e-5, 1e-5 * std::abs(x));
    double c = x;
    if (hi - lo > 2.0 * delta) c = std::clamp(x, lo + delta, hi - delta);
    const double fm = f(c - delta);
    const double f0 = f(c);
    const double fp = f(c + delta);
    const double d2 = (fp - 2.0 * f0 + fm) / (delta * delta);
    const double noise =
        64.0 * std::numeric_limits<double>::epsilon() * (std::abs(fm) + 2.0 * std::abs(f0) + std::abs(fp)) / (delta * delta);
    return std::abs(d2) <= noise ? 0.0 : d2;
}

/// A function f on [a, b] together with its second derivative.
struct TargetFunction {
    std::function<double(double)> eval;
    std::function<double(double)> second_derivative;
    Derivative derivative_kind = Derivative::analytic;
    double a = 0.0;
    double b = 1.0;

    TargetFunction() = default;
    TargetFunction(std::function<double(double)> f, std::function<double(double)> f2, double lo, double hi)
        : eval(std::move(f)), second_derivative(std::move(f2)), derivative_kind(Derivative::analytic), a(lo), b(hi) {
        if (!(a < b)) throw std::invalid_argument("target function domain requires a < b");
    }

    /// f'' estimated by central differences.
    static TargetFunction with_numeric_derivative(std::function<double(double)> f, double lo, double hi) {
        TargetFunction t;
        if (!(lo < hi)) throw std::invalid_argument("target function domain requires a < b");
        t.eval = f;
        t.second_derivative = [f, lo, hi](double x) { return numeric_second_derivative(f, x, lo, hi); };
        t.derivative_kind = Derivative::numeric;
        t.a = lo;
        t.b = hi;
        return t;
    }

    double operator()(double x) const { return eval(x); }
    double d2(double x) const { return second_derivative(x); }
};

/// A polygonal function viewed as a target; its second derivative vanishes
/// away from the knots.
inline TargetFunction as_target(const PolygonalFunction& g) {
    const auto& p = g.partition();
    return TargetFunction([g](double x) { return g(x); }, [](double) { return 0.0; }, p.a(), p.b());
}

/// Several scalar targets sharing one domain.
struct VectorTargetFunction {
    std::vector<TargetFunction> components;

    VectorTargetFunction() = default;
    explicit VectorTargetFunction(std::vector<TargetFunction> c) : components(std::move(c)) {
        if (components.empty()) throw std::invalid_argument("vector target needs at least one component");
        for (const auto& f : components)
            if (f.a != components.front().a || f.b != components.front().b)
                throw std::invalid_argument("vector target components must share one domain");
    }

    std::size_t size() const { return components.size(); }
    double a() const { return components.front().a; }
    double b() const { return components.front().b; }
};

/// Nodal (hat) basis function phi_i of the partition evaluated at x.
inline double hat_basis(const Partition& p, std::size_t i, double x) {
    const std::size_t n = p.segments();
    if (i > n) throw std::out_of_range("hat basis index out of range");
    if (!p.contains(x)) throw std::domain_error("hat basis evaluated outside [a, b]");
    const double xi = p.knot(i);
    if (x == xi) return 1.0;
    if (x < xi) {
        if (i == 0) return 0.0;
        const double lo = p.knot(i - 1);
        return x <= lo ? 0.0 : (x - lo) / (xi - lo);
    }
    if (i == n) return 0.0;
    const double hi = p.knot(i + 1);
    return x >= hi ? 0.0 : (hi - x) / (hi - xi);
}

/// Interpolant pi_T f: ordinates v_i = f(x_i).
template <class F>
PolygonalFunction from_samples(const Partition& p, const F& f) {
    std::vector<double> v(p.knots().size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = f(p.knot(i));
        if (!std::isfinite(v[i]))
            throw std::domain_error("function is not finite at knot " + std::to_string(p.knot(i)));
    }
    return PolygonalFunction(p, std::move(v));
}

} // namespace polylin
