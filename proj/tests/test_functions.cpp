#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "polylin/expression.hpp"
#include "polylin/functions.hpp"

using namespace polylin;

TEST(Expression, Arithmetic) {
    EXPECT_DOUBLE_EQ(Expression("1 + 2 * 3")(0.0), 7.0);
    EXPECT_DOUBLE_EQ(Expression("(1 + 2) * 3")(0.0), 9.0);
    EXPECT_DOUBLE_EQ(Expression("2 ^ 3 ^ 2")(0.0), 512.0);
    EXPECT_DOUBLE_EQ(Expression("-x^2")(3.0), -9.0);
    EXPECT_DOUBLE_EQ(Expression("8 / 2 / 2")(0.0), 2.0);
    EXPECT_DOUBLE_EQ(Expression("x - -x")(1.5), 3.0);
    EXPECT_DOUBLE_EQ(Expression("1.5e2 * x")(2.0), 300.0);
}

TEST(Expression, FunctionsAndConstants) {
    EXPECT_DOUBLE_EQ(Expression("sin(pi / 2)")(0.0), 1.0);
    EXPECT_DOUBLE_EQ(Expression("exp(-x^2/2)/sqrt(2*pi)")(1.0), std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi));
    EXPECT_DOUBLE_EQ(Expression("log(e)")(0.0), 1.0);
    EXPECT_DOUBLE_EQ(Expression("abs(x) + tanh(0) + cos(0) + tan(0)")(-2.0), 3.0);
}

TEST(Expression, Errors) {
    EXPECT_THROW(Expression(""), parse_error);
    EXPECT_THROW(Expression("1 +"), parse_error);
    EXPECT_THROW(Expression("(x"), parse_error);
    EXPECT_THROW(Expression("foo(x)"), parse_error);
    EXPECT_THROW(Expression("x y"), parse_error);
    EXPECT_THROW(Expression("sin x"), parse_error);
}

TEST(Polynomial, FromRootsAndDerivative) {
    const auto p = Polynomial::from_roots({1.0, -2.0});
    EXPECT_EQ(p.coefficients(), (std::vector<double>{-2.0, 1.0, 1.0}));
    EXPECT_EQ(p.derivative().coefficients(), (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(Polynomial({4.0}).derivative().coefficients(), std::vector<double>{0.0});
}

TEST(Builtins, GaussianSecondDerivative) {
    const auto g = gaussian();
    const double x = 1.3;
    EXPECT_DOUBLE_EQ(g.d2(x), (x * x - 1.0) * g(x));
    EXPECT_EQ(g.derivative_kind, Derivative::analytic);
}

TEST(Builtins, AnalyticDerivativesMatchNumeric) {
    for (const auto& f : {gaussian(), chirp(), poly7()}) {
        const auto num = TargetFunction::with_numeric_derivative(f.eval, f.a, f.b);
        for (int j = 1; j < 10; ++j) {
            const double x = f.a + (f.b - f.a) * j / 10.0;
            const double scale = std::max(1.0, std::abs(f.d2(x)));
            EXPECT_NEAR(num.d2(x), f.d2(x), 1e-4 * scale) << "x = " << x;
        }
    }
}

TEST(Builtins, Poly7Roots) {
    const auto p = poly7();
    for (double r : {-4.0, -3.0, -2.5, 0.0, 1.5, 2.0, 3.0}) EXPECT_NEAR(p(r), 0.0, 1e-9);
    EXPECT_DOUBLE_EQ(p(1.0), 5.0 * 4.0 * 3.5 * 1.0 * -0.5 * -1.0 * -2.0);
}

TEST(FunctionSpec, Parsing) {
    EXPECT_EQ(parse_function_spec("gaussian").name, "gaussian");
    EXPECT_EQ(parse_function_spec("chirp").default_interval(), (std::pair{0.0, 1.0}));
    const auto p = parse_function_spec("polynomial(1, -2.5, 3)");
    EXPECT_EQ(p.name, "polynomial");
    EXPECT_EQ(p.coefficients, (std::vector<double>{1.0, -2.5, 3.0}));
    EXPECT_FALSE(p.default_interval().has_value());
    EXPECT_DOUBLE_EQ(p.make(0.0, 1.0)(2.0), 1.0 - 5.0 + 12.0);
    const auto e = parse_function_spec("expression(sin(x)^2)");
    EXPECT_EQ(e.expression, "sin(x)^2");
    EXPECT_EQ(e.make(0.0, 1.0).derivative_kind, Derivative::numeric);
}

TEST(FunctionSpec, Rejects) {
    EXPECT_THROW(parse_function_spec("gauss"), std::invalid_argument);
    EXPECT_THROW(parse_function_spec("polynomial(1,,2)"), std::invalid_argument);
    EXPECT_THROW(parse_function_spec("polynomial(1,a)"), std::invalid_argument);
    EXPECT_THROW(parse_function_spec("expression(x +)"), parse_error);
}
