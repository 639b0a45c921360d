#pragma once

// A small arithmetic language for data functions of (t, x).
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 't' | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | sqrt | tanh | abs | sign
//
// Exponents may not depend on t or x, which keeps t-differentiation closed
// over the language.

#include <memory>
#include <string>
#include <string_view>

#include "delaywave/error.hpp"

namespace delaywave::expr {

enum class NodeKind { number, constant, variable, add, sub, mul, div, pow, neg, call };
enum class Function { sin, cos, exp, sqrt, tanh, abs, sign };
enum class Variable { t, x };

struct Node;

/// Immutable, shareable expression tree.
class Expr {
public:
    Expr() = default;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    const Node& node() const { return *node_; }
    bool empty() const { return node_ == nullptr; }

private:
    std::shared_ptr<const Node> node_;
};

struct Node {
    NodeKind kind = NodeKind::number;
    double value = 0.0;         // number, and constant's value
    std::string name;           // constant name
    Variable variable = Variable::t;
    Function function = Function::sin;
    Expr lhs;                   // unary operand / call argument / left operand
    Expr rhs;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// Domain error during evaluation; what() names the offending subexpression.
class EvalError : public Error {
public:
    using Error::Error;
};

Expr parse(std::string_view source);

double evaluate(const Expr& e, double t, double x);

/// Symbolic d/dt (order 1 or 2) with constant folding and 0/1 elimination.
/// Sets *used_abs when an abs() had to be differentiated through sign().
Expr differentiate_t(const Expr& e, int order, bool* used_abs = nullptr);

/// Prints a form that reparses to a structurally identical tree.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);
bool depends_on(const Expr& e, Variable v);

/// An expression with its first and second t-derivatives.
struct DiffExpr {
    Expr expr;
    Expr dt;
    Expr dtt;
    bool abs_differentiated = false;

    static DiffExpr from(Expr e);
    static DiffExpr from_source(std::string_view source) { return from(parse(source)); }
};

}  // namespace delaywave::expr
