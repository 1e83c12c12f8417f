#pragma once

// Builtin targets and textual function specifications.
//
//   gaussian                exp(-x^2/2)/sqrt(2 pi), f'' = (x^2 - 1) f
//   chirp                   sin(10 pi x^2)
//   poly7                   (x+4)(x+3)(x+2.5)x(x-1.5)(x-2)(x-3)
//   polynomial(c0,c1,...)   sum_k c_k x^k
//   expression(<expr>)      see expression.hpp; f'' by finite differences

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polylin/core.hpp"
#include "polylin/expression.hpp"

namespace polylin {

/// Dense polynomial with ascending coefficients.
class Polynomial {
public:
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.push_back(0.0);
    }

    /// prod_j (x - r_j).
    static Polynomial from_roots(const std::vector<double>& roots) {
        std::vector<double> c{1.0};
        for (double r : roots) {
            std::vector<double> next(c.size() + 1, 0.0);
            for (std::size_t k = 0; k < c.size(); ++k) {
                next[k + 1] += c[k];
                next[k] -= r * c[k];
            }
            c = std::move(next);
        }
        return Polynomial(std::move(c));
    }

    double operator()(double x) const {
        double s = 0.0;
        for (std::size_t k = c_.size(); k-- > 0;) s = s * x + c_[k];
        return s;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial({0.0});
        std::vector<double> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    const std::vector<double>& coefficients() const { return c_; }

private:
    std::vector<double> c_;
};

inline TargetFunction gaussian(double a = 0.0, double b = 4.0) {
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return TargetFunction([norm](double x) { return norm * std::exp(-0.5 * x * x); },
                          [norm](double x) { return (x * x - 1.0) * norm * std::exp(-0.5 * x * x); }, a, b);
}

inline TargetFunction chirp(double a = 0.0, double b = 1.0) {
    constexpr double w = 10.0 * std::numbers::pi;
    return TargetFunction([](double x) { return std::sin(w * x * x); },
                          [](double x) {
                              const double ph = w * x * x;
                              return 2.0 * w * std::cos(ph) - 4.0 * w * w * x * x * std::sin(ph);
                          },
                          a, b);
}

inline TargetFunction polynomial(std::vector<double> coeffs, double a, double b) {
    Polynomial p(std::move(coeffs));
    Polynomial p2 = p.derivative().derivative();
    return TargetFunction(p, p2, a, b);
}

inline TargetFunction poly7(double a = -4.0, double b = 3.0) {
    const auto p = Polynomial::from_roots({-4.0, -3.0, -2.5, 0.0, 1.5, 2.0, 3.0});
    return polynomial(p.coefficients(), a, b);
}

inline TargetFunction expression(std::string_view text, double a, double b) {
    Expression e(text);
    return TargetFunction::with_numeric_derivative([e](double x) { return e(x); }, a, b);
}

/// A parsed `--function` argument.
struct FunctionSpec {
    std::string name;   ///< gaussian | chirp | poly7 | polynomial | expression
    std::string text;   ///< the original specification
    std::vector<double> coefficients;
    std::string expression;

    /// Default interval for builtins; nullopt when the caller must supply one.
    std::optional<std::pair<double, double>> default_interval() const {
        if (name == "gaussian") return std::pair{0.0, 4.0};
        if (name == "chirp") return std::pair{0.0, 1.0};
        if (name == "poly7") return std::pair{-4.0, 3.0};
        return std::nullopt;
    }

    TargetFunction make(double a, double b) const {
        if (name == "gaussian") return gaussian(a, b);
        if (name == "chirp") return chirp(a, b);
        if (name == "poly7") return poly7(a, b);
        if (name == "polynomial") return polynomial(coefficients, a, b);
        if (name == "expression") return polylin::expression(expression, a, b);
        throw std::invalid_argument("unknown function: " + name);
    }
};

inline FunctionSpec parse_function_spec(std::string_view text) {
    FunctionSpec s;
    s.text = std::string(text);
    auto body = [&](std::string_view prefix) -> std::optional<std::string_view> {
        if (text.size() > prefix.size() + 1 && text.substr(0, prefix.size()) == prefix && text[prefix.size()] == '(' &&
            text.back() == ')')
            return text.substr(prefix.size() + 1, text.size() - prefix.size() - 2);
        return std::nullopt;
    };
    if (text == "gaussian" || text == "chirp" || text == "poly7") {
        s.name = std::string(text);
        return s;
    }
    if (auto b = body("polynomial")) {
        s.name = "polynomial";
        std::string item;
        auto flush = [&] {
            std::size_t used = 0;
            try {
                s.coefficients.push_back(std::stod(item, &used));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad polynomial coefficient '" + item + "'");
            }
            if (item.find_first_not_of(" \t", used) != std::string::npos)
                throw std::invalid_argument("bad polynomial coefficient '" + item + "'");
            item.clear();
        };
        for (char c : *b) {
            if (c == ',')
                flush();
            else
                item.push_back(c);
        }
        flush();
        return s;
    }
    if (auto b = body("expression")) {
        s.name = "expression";
        s.expression = std::string(*b);
        Expression check(s.expression);
        return s;
    }
    throw std::invalid_argument("unknown function specification: " + std::string(text));
}

} // namespace polylin
