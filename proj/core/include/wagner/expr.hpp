#pragma once
#include <memory>
#include <string>
#include <string_view>

#include "wagner/errors.hpp"
#include "wagner/jet.hpp"

namespace wagner {

/// Scalar expressions in the chart variables u (= u1) and v (= u2).
///
/// Grammar is plain infix: + - * / ^ with ^ right-associative and unary
/// minus binding looser than ^ (so -v^2 parses as -(v^2)). No implicit
/// multiplication. Identifiers are limited to u, v, pi, e and the built-in
/// functions below.

enum class Var { U, V };

enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh, Abs };

enum class BinOp { Add, Sub, Mul, Div, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Number, ConstPi, ConstE, Variable, Neg, Binary, Call };

    Kind kind;
    double number = 0.0;  // Kind::Number
    Var var = Var::U;     // Kind::Variable
    BinOp op = BinOp::Add;
    Fn fn = Fn::Sin;
    NodePtr lhs, rhs;  // Neg/Call use lhs only
};

struct Expr {
    NodePtr root;

    bool operator==(const Expr& o) const;
    explicit operator bool() const { return static_cast<bool>(root); }
};

/// Parse an expression; throws SyntaxError / UnknownIdentifier with the
/// byte offset of the offending token.
Expr parse(std::string_view text);

/// Minimal-parentheses pretty printer. parse(to_string(e)) reproduces the
/// AST of e exactly.
std::string to_string(const Expr& e);

bool depends_on(const Expr& e, Var v);

// Programmatic builders (used by the surface catalog and tests).
Expr expr_number(double v);
Expr expr_var(Var v);
Expr expr_neg(Expr a);
Expr expr_bin(BinOp op, Expr a, Expr b);
Expr expr_call(Fn f, Expr a);

namespace detail {

inline double scalar_value(double x) { return x; }
inline double scalar_value(const Jet3& x) { return x.value; }
inline double scalar_value(const Jet2& x) { return x.f; }

/// Elementary functions for the plain double path, with the same domain
/// checks the jet versions enforce.
inline double fn_apply(Fn f, double x) {
    switch (f) {
        case Fn::Sin: return std::sin(x);
        case Fn::Cos: return std::cos(x);
        case Fn::Tan:
            if (std::cos(x) == 0.0) throw DomainError("tan at a pole");
            return std::tan(x);
        case Fn::Exp: return std::exp(x);
        case Fn::Log:
            if (x <= 0.0) throw DomainError("log of non-positive value");
            return std::log(x);
        case Fn::Sqrt:
            if (x < 0.0) throw DomainError("sqrt of negative value");
            return std::sqrt(x);
        case Fn::Sinh: return std::sinh(x);
        case Fn::Cosh: return std::cosh(x);
        case Fn::Tanh: return std::tanh(x);
        case Fn::Abs: return std::abs(x);
    }
    throw DomainError("unreachable function kind");
}

template <class S>
S fn_apply(Fn f, const S& a) {
    switch (f) {
        case Fn::Sin: return sin(a);
        case Fn::Cos: return cos(a);
        case Fn::Tan: return tan(a);
        case Fn::Exp: return exp(a);
        case Fn::Log: return log(a);
        case Fn::Sqrt: return sqrt(a);
        case Fn::Sinh: return sinh(a);
        case Fn::Cosh: return cosh(a);
        case Fn::Tanh: return tanh(a);
        case Fn::Abs: return abs(a);
    }
    throw DomainError("unreachable function kind");
}

inline double pow_apply(double a, double b) {
    if (b == std::rint(b) && std::abs(b) <= 64.0) {
        if (a == 0.0 && b < 0.0) throw DomainError("zero raised to a negative power");
        return std::pow(a, b);
    }
    if (a <= 0.0) throw DomainError("pow with non-positive base and non-integer exponent");
    return std::pow(a, b);
}

template <class S>
S pow_apply(const S& a, const S& b) {
    return pow(a, b);
}

template <class S>
S eval_node(const Node& n, const S& u, const S& v) {
    switch (n.kind) {
        case Node::Kind::Number: return S(n.number);
        case Node::Kind::ConstPi: return S(3.14159265358979323846);
        case Node::Kind::ConstE: return S(2.71828182845904523536);
        case Node::Kind::Variable: return n.var == Var::U ? u : v;
        case Node::Kind::Neg: return -eval_node(*n.lhs, u, v);
        case Node::Kind::Call: return fn_apply(n.fn, eval_node(*n.lhs, u, v));
        case Node::Kind::Binary: {
            const S a = eval_node(*n.lhs, u, v);
            const S b = eval_node(*n.rhs, u, v);
            switch (n.op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div:
                    if (scalar_value(b) == 0.0) throw DomainError("division by zero");
                    return a / b;
                case BinOp::Pow: return pow_apply(a, b);
            }
        }
    }
    throw DomainError("unreachable node kind");
}

}  // namespace detail

inline double eval(const Expr& e, double u, double v) {
    return detail::eval_node<double>(*e.root, u, v);
}

/// Value and derivatives to order 3 in one designated variable, the other
/// held fixed.
inline Jet3 eval_jet3(const Expr& e, double u, double v, Var wrt) {
    const Jet3 ju = wrt == Var::U ? Jet3::variable(u) : Jet3(u);
    const Jet3 jv = wrt == Var::V ? Jet3::variable(v) : Jet3(v);
    return detail::eval_node<Jet3>(*e.root, ju, jv);
}

/// Single-variable convenience for profile functions A(v).
inline Jet3 eval_jet3(const Expr& e, double v) { return eval_jet3(e, 0.0, v, Var::V); }

/// Two-variable jet: all partials to total order 2 plus pure third-order.
inline Jet2 eval_jet2(const Expr& e, double u, double v) {
    return detail::eval_node<Jet2>(*e.root, Jet2::var_u(u), Jet2::var_v(v));
}

/// Value plus first partials.
inline Deriv1 eval_deriv1(const Expr& e, double u, double v) {
    const Jet2 j = eval_jet2(e, u, v);
    return {j.f, j.fu, j.fv};
}

}  // namespace wagner
