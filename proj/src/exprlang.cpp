#include "delaywave/exprlang.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

#include "delaywave/format.hpp"

namespace delaywave::expr {

ParseError::ParseError(const std::string& message, int line, int column)
    : Error("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
            ": " + message),
      line_(line),
      column_(column) {}

namespace {

// ---------------------------------------------------------------------------
// Smart constructors. Every tree the module builds goes through these, so a
// negated literal is always stored as a negative number.

Expr make(Node n) { return Expr(std::make_shared<const Node>(std::move(n))); }

Expr number(double v) {
    Node n;
    n.kind = NodeKind::number;
    n.value = v;
    return make(std::move(n));
}

Expr constant(std::string name, double v) {
    Node n;
    n.kind = NodeKind::constant;
    n.name = std::move(name);
    n.value = v;
    return make(std::move(n));
}

Expr variable(Variable v) {
    Node n;
    n.kind = NodeKind::variable;
    n.variable = v;
    return make(std::move(n));
}

bool is_number(const Expr& e) { return e.node().kind == NodeKind::number; }
bool is_number(const Expr& e, double v) { return is_number(e) && e.node().value == v; }

Expr binary_raw(NodeKind kind, Expr a, Expr b) {
    Node n;
    n.kind = kind;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make(std::move(n));
}

Expr fold_or(NodeKind kind, const Expr& a, const Expr& b, double folded) {
    if (std::isfinite(folded)) {
        return number(folded);
    }
    return binary_raw(kind, a, b);
}

Expr make_neg(Expr a) {
    if (is_number(a)) {
        return number(-a.node().value);
    }
    if (a.node().kind == NodeKind::neg) {
        return a.node().lhs;
    }
    Node n;
    n.kind = NodeKind::neg;
    n.lhs = std::move(a);
    return make(std::move(n));
}

Expr make_add(Expr a, Expr b) {
    if (is_number(a) && is_number(b)) {
        return fold_or(NodeKind::add, a, b, a.node().value + b.node().value);
    }
    if (is_number(a, 0.0)) {
        return b;
    }
    if (is_number(b, 0.0)) {
        return a;
    }
    return binary_raw(NodeKind::add, std::move(a), std::move(b));
}

Expr make_sub(Expr a, Expr b) {
    if (is_number(a) && is_number(b)) {
        return fold_or(NodeKind::sub, a, b, a.node().value - b.node().value);
    }
    if (is_number(b, 0.0)) {
        return a;
    }
    if (is_number(a, 0.0)) {
        return make_neg(std::move(b));
    }
    return binary_raw(NodeKind::sub, std::move(a), std::move(b));
}

Expr make_mul(Expr a, Expr b) {
    if (is_number(a) && is_number(b)) {
        return fold_or(NodeKind::mul, a, b, a.node().value * b.node().value);
    }
    if (is_number(a, 0.0) || is_number(b, 0.0)) {
        return number(0.0);
    }
    if (is_number(a, 1.0)) {
        return b;
    }
    if (is_number(b, 1.0)) {
        return a;
    }
    if (is_number(a, -1.0)) {
        return make_neg(std::move(b));
    }
    if (is_number(b, -1.0)) {
        return make_neg(std::move(a));
    }
    return binary_raw(NodeKind::mul, std::move(a), std::move(b));
}

Expr make_div(Expr a, Expr b) {
    if (is_number(a) && is_number(b) && b.node().value != 0.0) {
        return fold_or(NodeKind::div, a, b, a.node().value / b.node().value);
    }
    if (is_number(a, 0.0) && !is_number(b, 0.0)) {
        return number(0.0);
    }
    if (is_number(b, 1.0)) {
        return a;
    }
    return binary_raw(NodeKind::div, std::move(a), std::move(b));
}

Expr make_pow(Expr a, Expr b) {
    if (is_number(b, 0.0)) {
        return number(1.0);
    }
    if (is_number(b, 1.0)) {
        return a;
    }
    if (is_number(a) && is_number(b)) {
        return fold_or(NodeKind::pow, a, b, std::pow(a.node().value, b.node().value));
    }
    return binary_raw(NodeKind::pow, std::move(a), std::move(b));
}

Expr make_call_raw(Function f, Expr a) {
    Node n;
    n.kind = NodeKind::call;
    n.function = f;
    n.lhs = std::move(a);
    return make(std::move(n));
}

double apply(Function f, double v) {
    switch (f) {
        case Function::sin: return std::sin(v);
        case Function::cos: return std::cos(v);
        case Function::exp: return std::exp(v);
        case Function::sqrt: return std::sqrt(v);
        case Function::tanh: return std::tanh(v);
        case Function::abs: return std::abs(v);
        case Function::sign: return (v > 0.0) - (v < 0.0);
    }
    return 0.0;
}

Expr make_call(Function f, Expr a) {
    if (is_number(a) && !(f == Function::sqrt && a.node().value < 0.0)) {
        const double v = apply(f, a.node().value);
        if (std::isfinite(v)) {
            return number(v);
        }
    }
    return make_call_raw(f, std::move(a));
}

const char* function_name(Function f) {
    switch (f) {
        case Function::sin: return "sin";
        case Function::cos: return "cos";
        case Function::exp: return "exp";
        case Function::sqrt: return "sqrt";
        case Function::tanh: return "tanh";
        case Function::abs: return "abs";
        case Function::sign: return "sign";
    }
    return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
    for (auto f : {Function::sin, Function::cos, Function::exp, Function::sqrt, Function::tanh,
                   Function::abs, Function::sign}) {
        if (name == function_name(f)) {
            return f;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lexer + recursive-descent parser.

enum class TokenKind { number, identifier, op, end };

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;
    double value = 0.0;
    int line = 1;
    int column = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) { advance(); }

    Expr parse_all() {
        if (current_.kind == TokenKind::end) {
            fail("empty expression");
        }
        Expr e = parse_expr();
        if (current_.kind != TokenKind::end) {
            fail("unexpected '" + current_.text + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, current_.line, current_.column);
    }

    [[noreturn]] void fail_at(const std::string& message, const Token& tok) const {
        throw ParseError(message, tok.line, tok.column);
    }

    bool at_op(char c) const {
        return current_.kind == TokenKind::op && current_.text.size() == 1 && current_.text[0] == c;
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            if (src_[pos_] == '\n') {
                ++line_;
                line_start_ = pos_ + 1;
            }
            ++pos_;
        }
    }

    void advance() {
        skip_space();
        Token tok;
        tok.line = line_;
        tok.column = static_cast<int>(pos_ - line_start_) + 1;
        if (pos_ >= src_.size()) {
            tok.kind = TokenKind::end;
            tok.text = "end of input";
            current_ = tok;
            return;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = pos_;
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
                ++end;
            }
            if (end < src_.size() && src_[end] == '.') {
                ++end;
                while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
                    ++end;
                }
            }
            // Exponent only when digits follow, so "2e" stays number + identifier.
            if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
                std::size_t k = end + 1;
                if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) {
                    ++k;
                }
                if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
                    while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
                        ++k;
                    }
                    end = k;
                }
            }
            tok.kind = TokenKind::number;
            tok.text = std::string(src_.substr(pos_, end - pos_));
            const auto [ptr, ec] =
                std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.value);
            if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
                current_ = tok;
                fail("malformed number '" + tok.text + "'");
            }
            pos_ = end;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
                ++end;
            }
            tok.kind = TokenKind::identifier;
            tok.text = std::string(src_.substr(pos_, end - pos_));
            pos_ = end;
        } else if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
            tok.kind = TokenKind::op;
            tok.text = std::string(1, c);
            ++pos_;
        } else {
            current_ = tok;
            current_.text = std::string(1, c);
            fail("unexpected character '" + std::string(1, c) + "'");
        }
        current_ = tok;
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        while (at_op('+') || at_op('-')) {
            const bool plus = at_op('+');
            advance();
            Expr rhs = parse_term();
            lhs = binary_raw(plus ? NodeKind::add : NodeKind::sub, lhs, rhs);
        }
        return lhs;
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        while (at_op('*') || at_op('/')) {
            const bool mul = at_op('*');
            advance();
            Expr rhs = parse_unary();
            lhs = binary_raw(mul ? NodeKind::mul : NodeKind::div, lhs, rhs);
        }
        return lhs;
    }

    Expr parse_unary() {
        if (at_op('-')) {
            advance();
            return make_neg(parse_unary());
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (at_op('^')) {
            advance();
            const Token exponent_start = current_;
            Expr exponent = parse_unary();
            if (depends_on(exponent, Variable::t) || depends_on(exponent, Variable::x)) {
                fail_at("exponent must not depend on t or x", exponent_start);
            }
            return binary_raw(NodeKind::pow, base, exponent);
        }
        return base;
    }

    Expr parse_primary() {
        const Token tok = current_;
        if (tok.kind == TokenKind::number) {
            advance();
            return number(tok.value);
        }
        if (tok.kind == TokenKind::identifier) {
            advance();
            if (tok.text == "t") {
                return variable(Variable::t);
            }
            if (tok.text == "x") {
                return variable(Variable::x);
            }
            if (tok.text == "pi") {
                return constant("pi", std::numbers::pi);
            }
            if (tok.text == "e") {
                return constant("e", std::numbers::e);
            }
            const auto f = function_from_name(tok.text);
            if (!f) {
                fail_at("unknown identifier '" + tok.text + "'", tok);
            }
            if (!at_op('(')) {
                fail("expected '(' after function '" + tok.text + "'");
            }
            advance();
            if (at_op(')')) {
                fail_at("function '" + tok.text + "' takes exactly 1 argument, got 0", tok);
            }
            Expr arg = parse_expr();
            if (at_op(',')) {
                fail_at("function '" + tok.text + "' takes exactly 1 argument", tok);
            }
            if (!at_op(')')) {
                fail("expected ')'");
            }
            advance();
            return make_call_raw(*f, arg);
        }
        if (at_op('(')) {
            advance();
            Expr inner = parse_expr();
            if (!at_op(')')) {
                fail("expected ')'");
            }
            advance();
            return inner;
        }
        if (tok.kind == TokenKind::end) {
            fail("unexpected end of input");
        }
        fail("unexpected '" + tok.text + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::size_t line_start_ = 0;
    Token current_;
};

// ---------------------------------------------------------------------------

[[noreturn]] void domain_error(const std::string& what, const Expr& e) {
    throw EvalError("evaluation domain error (" + what + ") in " + to_string(e));
}

Expr derivative(const Expr& e, bool* used_abs) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::number:
        case NodeKind::constant:
            return number(0.0);
        case NodeKind::variable:
            return number(n.variable == Variable::t ? 1.0 : 0.0);
        case NodeKind::add:
            return make_add(derivative(n.lhs, used_abs), derivative(n.rhs, used_abs));
        case NodeKind::sub:
            return make_sub(derivative(n.lhs, used_abs), derivative(n.rhs, used_abs));
        case NodeKind::mul:
            return make_add(make_mul(derivative(n.lhs, used_abs), n.rhs),
                            make_mul(n.lhs, derivative(n.rhs, used_abs)));
        case NodeKind::div: {
            const Expr da = derivative(n.lhs, used_abs);
            const Expr db = derivative(n.rhs, used_abs);
            if (is_number(db, 0.0)) {
                return make_div(da, n.rhs);
            }
            return make_div(make_sub(make_mul(da, n.rhs), make_mul(n.lhs, db)),
                            make_pow(n.rhs, number(2.0)));
        }
        case NodeKind::pow: {
            // Exponent is t-free by construction.
            const Expr da = derivative(n.lhs, used_abs);
            if (is_number(da, 0.0)) {
                return number(0.0);
            }
            return make_mul(make_mul(n.rhs, make_pow(n.lhs, make_sub(n.rhs, number(1.0)))), da);
        }
        case NodeKind::neg:
            return make_neg(derivative(n.lhs, used_abs));
        case NodeKind::call: {
            const Expr da = derivative(n.lhs, used_abs);
            if (is_number(da, 0.0)) {
                return number(0.0);
            }
            const Expr& u = n.lhs;
            switch (n.function) {
                case Function::sin:
                    return make_mul(make_call(Function::cos, u), da);
                case Function::cos:
                    return make_neg(make_mul(make_call(Function::sin, u), da));
                case Function::exp:
                    return make_mul(e, da);
                case Function::sqrt:
                    return make_div(da, make_mul(number(2.0), e));
                case Function::tanh:
                    return make_mul(make_sub(number(1.0), make_pow(e, number(2.0))), da);
                case Function::abs:
                    if (used_abs != nullptr) {
                        *used_abs = true;
                    }
                    return make_mul(make_call(Function::sign, u), da);
                case Function::sign:
                    return number(0.0);
            }
        }
    }
    return number(0.0);
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

double evaluate(const Expr& e, double t, double x) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::number:
        case NodeKind::constant:
            return n.value;
        case NodeKind::variable:
            return n.variable == Variable::t ? t : x;
        case NodeKind::add:
            return evaluate(n.lhs, t, x) + evaluate(n.rhs, t, x);
        case NodeKind::sub:
            return evaluate(n.lhs, t, x) - evaluate(n.rhs, t, x);
        case NodeKind::mul:
            return evaluate(n.lhs, t, x) * evaluate(n.rhs, t, x);
        case NodeKind::div: {
            const double d = evaluate(n.rhs, t, x);
            if (d == 0.0) {
                domain_error("division by zero", e);
            }
            return evaluate(n.lhs, t, x) / d;
        }
        case NodeKind::pow: {
            const double base = evaluate(n.lhs, t, x);
            const double exponent = evaluate(n.rhs, t, x);
            if (base < 0.0 && !is_integer(exponent)) {
                domain_error("negative base with non-integer exponent", e);
            }
            if (base == 0.0 && exponent < 0.0) {
                domain_error("zero to a negative power", e);
            }
            return std::pow(base, exponent);
        }
        case NodeKind::neg:
            return -evaluate(n.lhs, t, x);
        case NodeKind::call: {
            const double v = evaluate(n.lhs, t, x);
            if (n.function == Function::sqrt && v < 0.0) {
                domain_error("sqrt of negative argument", e);
            }
            const double r = apply(n.function, v);
            if (!std::isfinite(r) && std::isfinite(v)) {
                domain_error("overflow", e);
            }
            return r;
        }
    }
    return 0.0;
}

Expr differentiate_t(const Expr& e, int order, bool* used_abs) {
    if (order != 1 && order != 2) {
        throw InvalidArgument("differentiate_t: order must be 1 or 2");
    }
    Expr d = derivative(e, used_abs);
    if (order == 2) {
        d = derivative(d, used_abs);
    }
    return d;
}

std::string to_string(const Expr& e) {
    const Node& n = e.node();
    auto binary = [&](const char* op) {
        return "(" + to_string(n.lhs) + op + to_string(n.rhs) + ")";
    };
    switch (n.kind) {
        case NodeKind::number: {
            const std::string s = format_double(n.value);
            return n.value < 0.0 ? "(" + s + ")" : s;
        }
        case NodeKind::constant:
            return n.name;
        case NodeKind::variable:
            return n.variable == Variable::t ? "t" : "x";
        case NodeKind::add: return binary(" + ");
        case NodeKind::sub: return binary(" - ");
        case NodeKind::mul: return binary(" * ");
        case NodeKind::div: return binary(" / ");
        case NodeKind::pow: return binary("^");
        case NodeKind::neg:
            return "(-" + to_string(n.lhs) + ")";
        case NodeKind::call:
            return std::string(function_name(n.function)) + "(" + to_string(n.lhs) + ")";
    }
    return "?";
}

bool structurally_equal(const Expr& a, const Expr& b) {
    const Node& x = a.node();
    const Node& y = b.node();
    if (x.kind != y.kind) {
        return false;
    }
    switch (x.kind) {
        case NodeKind::number:
            return x.value == y.value;
        case NodeKind::constant:
            return x.name == y.name;
        case NodeKind::variable:
            return x.variable == y.variable;
        case NodeKind::neg:
            return structurally_equal(x.lhs, y.lhs);
        case NodeKind::call:
            return x.function == y.function && structurally_equal(x.lhs, y.lhs);
        default:
            return structurally_equal(x.lhs, y.lhs) && structurally_equal(x.rhs, y.rhs);
    }
}

bool depends_on(const Expr& e, Variable v) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::number:
        case NodeKind::constant:
            return false;
        case NodeKind::variable:
            return n.variable == v;
        case NodeKind::neg:
        case NodeKind::call:
            return depends_on(n.lhs, v);
        default:
            return depends_on(n.lhs, v) || depends_on(n.rhs, v);
    }
}

DiffExpr DiffExpr::from(Expr e) {
    DiffExpr d;
    d.expr = std::move(e);
    d.dt = differentiate_t(d.expr, 1, &d.abs_differentiated);
    d.dtt = differentiate_t(d.dt, 1, &d.abs_differentiated);
    return d;
}

}  // namespace delaywave::expr
