#pragma once

// Minimal arithmetic expressions in one variable `x`.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'
//
// Functions: sin cos tan exp log sqrt abs tanh.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace polylin {

class parse_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Expression {
public:
    explicit Expression(std::string_view text) : text_(text) {
        Parser p{text_, 0};
        root_ = p.parse_expr();
        p.skip_space();
        if (p.pos != p.src.size())
            throw parse_error("unexpected '" + std::string(1, p.src[p.pos]) + "' at position " + std::to_string(p.pos));
    }

    double operator()(double x) const { return root_->eval(x); }
    const std::string& text() const { return text_; }

private:
    struct Node {
        virtual ~Node() = default;
        virtual double eval(double x) const = 0;
    };
    using NodePtr = std::shared_ptr<const Node>;

    struct Constant final : Node {
        double value;
        explicit Constant(double v) : value(v) {}
        double eval(double) const override { return value; }
    };
    struct Variable final : Node {
        double eval(double x) const override { return x; }
    };
    struct Negate final : Node {
        NodePtr arg;
        explicit Negate(NodePtr a) : arg(std::move(a)) {}
        double eval(double x) const override { return -arg->eval(x); }
    };
    struct Binary final : Node {
        char op;
        NodePtr lhs, rhs;
        Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
        double eval(double x) const override {
            const double l = lhs->eval(x);
            const double r = rhs->eval(x);
            switch (op) {
            case '+': return l + r;
            case '-': return l - r;
            case '*': return l * r;
            case '/': return l / r;
            default: return std::pow(l, r);
            }
        }
    };
    struct Call final : Node {
        double (*fn)(double);
        NodePtr arg;
        Call(double (*f)(double), NodePtr a) : fn(f), arg(std::move(a)) {}
        double eval(double x) const override { return fn(arg->eval(x)); }
    };

    struct Parser {
        std::string_view src;
        std::size_t pos;

        void skip_space() {
            while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
        }
        bool accept(char c) {
            skip_space();
            if (pos < src.size() && src[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        void expect(char c) {
            if (!accept(c)) throw parse_error(std::string("expected '") + c + "' at position " + std::to_string(pos));
        }

        NodePtr parse_expr() {
            NodePtr lhs = parse_term();
            for (;;) {
                if (accept('+'))
                    lhs = std::make_shared<Binary>('+', lhs, parse_term());
                else if (accept('-'))
                    lhs = std::make_shared<Binary>('-', lhs, parse_term());
                else
                    return lhs;
            }
        }
        NodePtr parse_term() {
            NodePtr lhs = parse_unary();
            for (;;) {
                if (accept('*'))
                    lhs = std::make_shared<Binary>('*', lhs, parse_unary());
                else if (accept('/'))
                    lhs = std::make_shared<Binary>('/', lhs, parse_unary());
                else
                    return lhs;
            }
        }
        NodePtr parse_unary() {
            if (accept('-')) return std::make_shared<Negate>(parse_unary());
            if (accept('+')) return parse_unary();
            return parse_power();
        }
        NodePtr parse_power() {
            NodePtr base = parse_primary();
            if (accept('^')) return std::make_shared<Binary>('^', base, parse_unary());
            return base;
        }
        NodePtr parse_primary() {
            skip_space();
            if (pos >= src.size()) throw parse_error("unexpected end of expression");
            const char c = src[pos];
            if (accept('(')) {
                NodePtr e = parse_expr();
                expect(')');
                return e;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                const std::string rest(src.substr(pos));
                char* end = nullptr;
                const double v = std::strtod(rest.c_str(), &end);
                if (end == rest.c_str()) throw parse_error("bad number at position " + std::to_string(pos));
                pos += static_cast<std::size_t>(end - rest.c_str());
                return std::make_shared<Constant>(v);
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                const std::size_t start = pos;
                while (pos < src.size() && std::isalnum(static_cast<unsigned char>(src[pos]))) ++pos;
                const std::string_view name = src.substr(start, pos - start);
                if (name == "x") return std::make_shared<Variable>();
                if (name == "pi") return std::make_shared<Constant>(std::numbers::pi);
                if (name == "e") return std::make_shared<Constant>(std::numbers::e);
                double (*fn)(double) = lookup(name);
                if (!fn) throw parse_error("unknown identifier '" + std::string(name) + "'");
                expect('(');
                NodePtr arg = parse_expr();
                expect(')');
                return std::make_shared<Call>(fn, arg);
            }
            throw parse_error("unexpected '" + std::string(1, c) + "' at position " + std::to_string(pos));
        }

        static double (*lookup(std::string_view name))(double) {
            if (name == "sin") return [](double v) { return std::sin(v); };
            if (name == "cos") return [](double v) { return std::cos(v); };
            if (name == "tan") return [](double v) { return std::tan(v); };
            if (name == "exp") return [](double v) { return std::exp(v); };
            if (name == "log") return [](double v) { return std::log(v); };
            if (name == "sqrt") return [](double v) { return std::sqrt(v); };
            if (name == "abs") return [](double v) { return std::abs(v); };
            if (name == "tanh") return [](double v) { return std::tanh(v); };
            return nullptr;
        }
    };

    std::string text_;
    NodePtr root_;
};

} // namespace polylin
