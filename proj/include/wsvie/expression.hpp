#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wsvie::expr {

/// Variables an expression may refer to. Each problem-file key admits a subset.
enum class Var : unsigned char { s, t, x, B };

inline constexpr std::size_t var_count = 4;
using Bindings = std::array<double, var_count>;

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

enum class Func : unsigned char { sin, cos, exp, tanh, sech, sinh, asinh, atanh, sqrt };

inline std::optional<Func> lookup_function(std::string_view name) {
    static constexpr std::array<std::pair<std::string_view, Func>, 9> table{{
        {"sin", Func::sin},
        {"cos", Func::cos},
        {"exp", Func::exp},
        {"tanh", Func::tanh},
        {"sech", Func::sech},
        {"sinh", Func::sinh},
        {"asinh", Func::asinh},
        {"atanh", Func::atanh},
        {"sqrt", Func::sqrt},
    }};
    for (const auto& [n, f] : table)
        if (n == name) return f;
    return std::nullopt;
}

inline std::optional<Var> lookup_variable(std::string_view name) {
    if (name == "s") return Var::s;
    if (name == "t") return Var::t;
    if (name == "x") return Var::x;
    if (name == "B") return Var::B;
    return std::nullopt;
}

inline double apply(Func f, double v) {
    switch (f) {
        case Func::sin: return std::sin(v);
        case Func::cos: return std::cos(v);
        case Func::exp: return std::exp(v);
        case Func::tanh: return std::tanh(v);
        case Func::sech: return 1.0 / std::cosh(v);
        case Func::sinh: return std::sinh(v);
        case Func::asinh: return std::asinh(v);
        case Func::atanh: return std::atanh(v);
        case Func::sqrt: return std::sqrt(v);
    }
    return std::nan("");
}

/// Immutable expression tree. Cheap to copy; safe to evaluate concurrently.
class Expression {
    struct Node {
        enum class Kind : unsigned char { number, variable, negate, add, sub, mul, div, pow, call };
        Kind kind;
        double value = 0.0;
        Var var = Var::s;
        Func func = Func::sin;
        std::shared_ptr<const Node> lhs, rhs;
    };
    using NodePtr = std::shared_ptr<const Node>;

public:
    double operator()(const Bindings& b) const { return eval(*root_, b); }

    /// Value if the expression references no variables.
    std::optional<double> constant() const {
        if (uses_variables(*root_)) return std::nullopt;
        return eval(*root_, Bindings{});
    }

    friend Expression parse(std::string_view text, unsigned allowed_vars, std::size_t line,
                            std::size_t column_offset);

private:
    explicit Expression(NodePtr root) : root_(std::move(root)) {}

    static double eval(const Node& n, const Bindings& b) {
        using K = Node::Kind;
        switch (n.kind) {
            case K::number: return n.value;
            case K::variable: return b[static_cast<std::size_t>(n.var)];
            case K::negate: return -eval(*n.lhs, b);
            case K::add: return eval(*n.lhs, b) + eval(*n.rhs, b);
            case K::sub: return eval(*n.lhs, b) - eval(*n.rhs, b);
            case K::mul: return eval(*n.lhs, b) * eval(*n.rhs, b);
            case K::div: return eval(*n.lhs, b) / eval(*n.rhs, b);
            case K::pow: return std::pow(eval(*n.lhs, b), eval(*n.rhs, b));
            case K::call: return apply(n.func, eval(*n.lhs, b));
        }
        return std::nan("");
    }

    static bool uses_variables(const Node& n) {
        if (n.kind == Node::Kind::variable) return true;
        return (n.lhs && uses_variables(*n.lhs)) || (n.rhs && uses_variables(*n.rhs));
    }

    class Parser;

    NodePtr root_;
};

inline constexpr unsigned bit(Var v) { return 1u << static_cast<unsigned>(v); }

/// Recursive descent over
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | name | name '(' expr ')' | '(' expr ')'
/// so '^' binds tighter than unary minus and associates to the right.
class Expression::Parser {
public:
    Parser(std::string_view text, unsigned allowed, std::size_t line, std::size_t column_offset)
        : text_(text), allowed_(allowed), line_(line), offset_(column_offset) {}

    NodePtr parse_all() {
        skip_space();
        if (at_end()) fail("empty expression");
        NodePtr n = parse_expr();
        skip_space();
        if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
        return n;
    }

private:
    using K = Node::Kind;

    [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
    [[noreturn]] void fail_at(const std::string& what, std::size_t pos) const {
        throw ParseError(what, line_, offset_ + pos + 1);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_space();
        if (!at_end() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make(K kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = make(K::add, lhs, parse_term());
            else if (accept('-')) lhs = make(K::sub, lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make(K::mul, lhs, parse_unary());
            else if (accept('/')) lhs = make(K::div, lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make(K::negate, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make(K::pow, base, parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        skip_space();
        if (at_end()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail(std::string("unexpected '") + c + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        double value = 0.0;
        const auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (res.ec != std::errc{}) fail_at("malformed number", start);
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        auto n = std::make_shared<Node>();
        n->kind = K::number;
        n->value = value;
        return n;
    }

    NodePtr parse_name() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                             text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        skip_space();
        if (!at_end() && text_[pos_] == '(') {
            const auto f = lookup_function(name);
            if (!f) fail_at("unknown function '" + std::string(name) + "'", start);
            ++pos_;
            NodePtr arg = parse_expr();
            if (!accept(')')) fail("expected ')'");
            auto n = std::make_shared<Node>();
            n->kind = K::call;
            n->func = *f;
            n->lhs = std::move(arg);
            return n;
        }
        const auto v = lookup_variable(name);
        if (!v || !(allowed_ & bit(*v))) {
            if (lookup_function(name)) fail_at("function '" + std::string(name) + "' needs '('", start);
            fail_at("unknown variable '" + std::string(name) + "'", start);
        }
        auto n = std::make_shared<Node>();
        n->kind = K::variable;
        n->var = *v;
        return n;
    }

    std::string_view text_;
    unsigned allowed_;
    std::size_t line_;
    std::size_t offset_;
    std::size_t pos_ = 0;
};

/// Parse `text`. `allowed_vars` is a mask of bit(Var::...). Line and column
/// offset are only used to position error messages inside a larger file.
inline Expression parse(std::string_view text, unsigned allowed_vars, std::size_t line = 1,
                        std::size_t column_offset = 0) {
    Expression::Parser p(text, allowed_vars, line, column_offset);
    return Expression(p.parse_all());
}

}  // namespace wsvie::expr
