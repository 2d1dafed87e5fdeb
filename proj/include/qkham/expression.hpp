#pragma once

// Hamiltonian expression language.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?            right-associative
//   atom   := number | variable | func '(' expr ')' | '(' expr ')'
//   func   := sin | cos | exp | sqrt
//   variable := x1 .. x{4n}
//
// Unary minus binds looser than '^': -x1^2 is -(x1^2). Whitespace is
// insignificant. Literals are IEEE doubles.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "qkham/dual.hpp"
#include "qkham/matrix.hpp"
#include "qkham/structures.hpp"

namespace qkham {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Exp, Sqrt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    struct Number {
        double value;
    };
    struct Variable {
        std::size_t index;  // 1-based
    };
    struct Negate {
        ExprPtr operand;
    };
    struct Binary {
        BinaryOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct Call {
        Function fn;
        ExprPtr arg;
    };

    std::variant<Number, Variable, Negate, Binary, Call> node;
};

class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownIdentifier, VariableOutOfRange };

    ParseError(Kind kind, std::size_t offset, std::string message, std::vector<std::string> expected = {})
        : std::runtime_error(std::move(message)), kind_(kind), offset_(offset), expected_(std::move(expected)) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    Kind kind_;
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, std::string subexpression)
        : std::runtime_error(what + " in " + subexpression), subexpression_(std::move(subexpression)) {}

    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

inline std::string_view to_string(Function f) {
    switch (f) {
        case Function::Sin: return "sin";
        case Function::Cos: return "cos";
        case Function::Exp: return "exp";
        case Function::Sqrt: return "sqrt";
    }
    return "?";
}

inline char to_char(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return '+';
        case BinaryOp::Sub: return '-';
        case BinaryOp::Mul: return '*';
        case BinaryOp::Div: return '/';
        case BinaryOp::Pow: return '^';
    }
    return '?';
}

inline std::string format_number(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Fully parenthesized rendering; parsing the output yields an identical tree.
inline std::string to_string(const Expr& e) {
    struct Printer {
        std::string operator()(const Expr::Number& n) const { return format_number(n.value); }
        std::string operator()(const Expr::Variable& v) const { return "x" + std::to_string(v.index); }
        std::string operator()(const Expr::Negate& n) const { return "(-" + to_string(*n.operand) + ")"; }
        std::string operator()(const Expr::Binary& b) const {
            return "(" + to_string(*b.lhs) + " " + to_char(b.op) + " " + to_string(*b.rhs) + ")";
        }
        std::string operator()(const Expr::Call& c) const {
            return std::string(to_string(c.fn)) + "(" + to_string(*c.arg) + ")";
        }
    };
    return std::visit(Printer{}, e.node);
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using N = std::decay_t<decltype(x)>;
            const auto& y = std::get<N>(b.node);
            if constexpr (std::is_same_v<N, Expr::Number>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<N, Expr::Variable>) {
                return x.index == y.index;
            } else if constexpr (std::is_same_v<N, Expr::Negate>) {
                return structurally_equal(*x.operand, *y.operand);
            } else if constexpr (std::is_same_v<N, Expr::Binary>) {
                return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) && structurally_equal(*x.rhs, *y.rhs);
            } else {
                return x.fn == y.fn && structurally_equal(*x.arg, *y.arg);
            }
        },
        a.node);
}

namespace detail {

class Parser {
public:
    Parser(std::string_view text, BlockDim dim) : text_(text), dim_(dim) {}

    ExprPtr parse() {
        skip_ws();
        if (at_end()) throw syntax_error({"number", "variable", "function", "'('", "'-'"});
        auto e = parse_expr();
        skip_ws();
        if (!at_end()) throw syntax_error({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
        return e;
    }

private:
    static ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_ws() {
        while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    ParseError syntax_error(std::vector<std::string> expected) const {
        std::string msg = "syntax error at byte " + std::to_string(pos_);
        if (at_end())
            msg += " (end of input)";
        else
            msg += " near '" + std::string(1, text_[pos_]) + "'";
        msg += ": expected one of";
        for (std::size_t i = 0; i < expected.size(); ++i) msg += (i == 0 ? " " : ", ") + expected[i];
        return ParseError(ParseError::Kind::Syntax, pos_, std::move(msg), std::move(expected));
    }

    ExprPtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make(Expr::Binary{BinaryOp::Add, lhs, parse_term()});
            else if (accept('-'))
                lhs = make(Expr::Binary{BinaryOp::Sub, lhs, parse_term()});
            else
                return lhs;
        }
    }

    ExprPtr parse_term() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Expr::Binary{BinaryOp::Mul, lhs, parse_unary()});
            else if (accept('/'))
                lhs = make(Expr::Binary{BinaryOp::Div, lhs, parse_unary()});
            else
                return lhs;
        }
    }

    ExprPtr parse_unary() {
        if (accept('-')) return make(Expr::Negate{parse_unary()});
        return parse_power();
    }

    ExprPtr parse_power() {
        auto base = parse_atom();
        if (accept('^')) return make(Expr::Binary{BinaryOp::Pow, base, parse_unary()});
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!accept(')')) throw syntax_error({"'+'", "'-'", "'*'", "'/'", "'^'", "')'"});
            return inner;
        }
        if (is_digit(c) || c == '.') return parse_number();
        if (is_ident_start(c)) return parse_identifier();
        throw syntax_error({"number", "variable", "function", "'('", "'-'"});
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (is_digit(peek())) ++pos_;
        if (peek() == '.') {
            ++pos_;
            while (is_digit(peek())) ++pos_;
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t save = pos_;
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (!is_digit(peek())) {
                pos_ = save;
            } else {
                while (is_digit(peek())) ++pos_;
            }
        }
        const std::string_view lexeme = text_.substr(start, pos_ - start);
        double value = 0.0;
        const auto res = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
        if (res.ec != std::errc{} || res.ptr != lexeme.data() + lexeme.size() || !std::isfinite(value)) {
            pos_ = start;
            throw syntax_error({"number"});
        }
        return make(Expr::Number{value});
    }

    ExprPtr parse_identifier() {
        const std::size_t start = pos_;
        while (is_ident_char(peek())) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        for (Function f : {Function::Sin, Function::Cos, Function::Exp, Function::Sqrt}) {
            if (name != to_string(f)) continue;
            if (!accept('(')) throw syntax_error({"'('"});
            auto arg = parse_expr();
            if (!accept(')')) throw syntax_error({"'+'", "'-'", "'*'", "'/'", "'^'", "')'"});
            return make(Expr::Call{f, arg});
        }

        if (name.size() >= 2 && name[0] == 'x') {
            const std::string_view digits = name.substr(1);
            bool all_digits = true;
            for (char d : digits) all_digits = all_digits && is_digit(d);
            if (all_digits) {
                std::size_t index = 0;
                const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), index);
                if (res.ec != std::errc{} || index < 1 || index > dim_.size()) {
                    throw ParseError(ParseError::Kind::VariableOutOfRange, start,
                                     "variable index out of range: '" + std::string(name) + "' at byte " +
                                         std::to_string(start) + " (valid: x1..x" + std::to_string(dim_.size()) +
                                         ")");
                }
                return make(Expr::Variable{index});
            }
        }
        throw ParseError(ParseError::Kind::UnknownIdentifier, start,
                         "unknown identifier '" + std::string(name) + "' at byte " + std::to_string(start));
    }

    std::string_view text_;
    BlockDim dim_;
    std::size_t pos_ = 0;
};

template <typename T>
double value_of(const T& x) {
    if constexpr (std::is_same_v<T, double>)
        return x;
    else
        return x.value;
}

template <typename T>
T evaluate_node(const Expr& e, std::span<const T> x) {
    using std::cos, std::exp, std::pow, std::sin, std::sqrt;
    return std::visit(
        [&](const auto& node) -> T {
            using N = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<N, Expr::Number>) {
                return T(node.value);
            } else if constexpr (std::is_same_v<N, Expr::Variable>) {
                return x[node.index - 1];
            } else if constexpr (std::is_same_v<N, Expr::Negate>) {
                return -evaluate_node(*node.operand, x);
            } else if constexpr (std::is_same_v<N, Expr::Binary>) {
                const T a = evaluate_node(*node.lhs, x);
                const T b = evaluate_node(*node.rhs, x);
                switch (node.op) {
                    case BinaryOp::Add: return a + b;
                    case BinaryOp::Sub: return a - b;
                    case BinaryOp::Mul: return a * b;
                    case BinaryOp::Div:
                        if (value_of(b) == 0.0) throw EvaluationError("division by zero", to_string(e));
                        return a / b;
                    case BinaryOp::Pow: {
                        const double base = value_of(a);
                        const double expo = value_of(b);
                        if (base == 0.0 && expo < 0.0) throw EvaluationError("division by zero", to_string(e));
                        if (base < 0.0 && expo != std::trunc(expo))
                            throw EvaluationError("negative base with non-integer exponent", to_string(e));
                        return pow(a, b);
                    }
                }
                return T{};
            } else {
                const T a = evaluate_node(*node.arg, x);
                switch (node.fn) {
                    case Function::Sin: return sin(a);
                    case Function::Cos: return cos(a);
                    case Function::Exp: return exp(a);
                    case Function::Sqrt:
                        if (value_of(a) < 0.0) throw EvaluationError("sqrt of negative value", to_string(e));
                        return sqrt(a);
                }
                return T{};
            }
        },
        e.node);
}

}  // namespace detail

/// A parsed Hamiltonian H: R^{4n} -> R. Immutable; safe to share.
class ScalarField {
public:
    ScalarField(BlockDim dim, ExprPtr root) : dim_(dim), root_(std::move(root)) {}

    BlockDim dim() const noexcept { return dim_; }
    const Expr& ast() const noexcept { return *root_; }
    const ExprPtr& root() const noexcept { return root_; }

private:
    BlockDim dim_;
    ExprPtr root_;
};

inline ScalarField parse(std::string_view text, BlockDim dim) {
    return ScalarField(dim, detail::Parser(text, dim).parse());
}

inline std::string to_string(const ScalarField& f) { return to_string(f.ast()); }

inline double evaluate(const ScalarField& field, std::span<const double> point) {
    require_same_size(field.dim().size(), point.size(), "evaluate");
    return detail::evaluate_node<double>(field.ast(), point);
}

/// Evaluates with any scalar type supporting the arithmetic and function set
/// (double or Dual<double>).
template <typename T>
T evaluate_as(const ScalarField& field, std::span<const T> point) {
    require_same_size(field.dim().size(), point.size(), "evaluate");
    return detail::evaluate_node<T>(field.ast(), point);
}

/// dH components dH/dx_a.
struct Gradient {
    BlockDim dim;
    Vector components;
};

/// Forward-mode gradient: one dual pass per coordinate.
inline Gradient gradient(const ScalarField& field, std::span<const double> point) {
    const std::size_t size = field.dim().size();
    require_same_size(size, point.size(), "gradient");
    std::vector<Dual<double>> seeded(point.begin(), point.end());
    Vector out(size);
    for (std::size_t a = 0; a < size; ++a) {
        seeded[a].derivative = 1.0;
        out[a] = evaluate_as<Dual<double>>(field, seeded).derivative;
        seeded[a].derivative = 0.0;
    }
    return {field.dim(), std::move(out)};
}

/// Central differences (H(x + h e_a) - H(x - h e_a)) / 2h.
inline Gradient fd_gradient(const ScalarField& field, std::span<const double> point, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step h must be > 0");
    const std::size_t size = field.dim().size();
    require_same_size(size, point.size(), "fd_gradient");
    Vector probe(point.begin(), point.end());
    Vector out(size);
    for (std::size_t a = 0; a < size; ++a) {
        const double x0 = probe[a];
        probe[a] = x0 + h;
        const double up = evaluate(field, probe);
        probe[a] = x0 - h;
        const double down = evaluate(field, probe);
        probe[a] = x0;
        out[a] = (up - down) / (2.0 * h);
    }
    return {field.dim(), std::move(out)};
}

}  // namespace qkham
