#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "qunity/error.hpp"

namespace qunity {

// Compile-time real constants: pi, Euler's number, naturals, and scientific
// calculator operations over them. Values never depend on quantum data, so
// every constant is evaluated (and validated) before anything runs.

struct IntExpr;
using IntPtr = std::shared_ptr<const IntExpr>;

// Integer metavariable expressions, used by parameterized definitions
// (qft(n+1), 2^k in phase angles). Closed integer expressions fold to
// naturals during expansion.
struct IntExpr {
    enum class Kind { Nat, Var, Add, Mul, Pow };
    Kind kind;
    long long nat = 0;
    std::string var;
    IntPtr lhs, rhs;
};

inline IntPtr int_nat(long long n) {
    auto e = std::make_shared<IntExpr>();
    e->kind = IntExpr::Kind::Nat;
    e->nat = n;
    return e;
}

inline IntPtr int_var(std::string name) {
    auto e = std::make_shared<IntExpr>();
    e->kind = IntExpr::Kind::Var;
    e->var = std::move(name);
    return e;
}

inline IntPtr int_binop(IntExpr::Kind k, IntPtr a, IntPtr b) {
    auto e = std::make_shared<IntExpr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

struct RealExpr;
using RealPtr = std::shared_ptr<const RealExpr>;

struct RealExpr {
    enum class Kind {
        Pi, Euler, Natural,
        Neg, Add, Mul, Div,
        Sin, Cos, Tan, Arcsin, Arccos, Arctan, Exp, Ln, Sqrt,
        // Surface-level only: an integer metavariable expression that the
        // expander resolves to Natural. Never survives expansion.
        IntAtom,
    };
    Kind kind;
    long long nat = 0;
    RealPtr lhs, rhs;
    IntPtr int_atom;
};

inline RealPtr real_leaf(RealExpr::Kind k) {
    auto r = std::make_shared<RealExpr>();
    r->kind = k;
    return r;
}

inline RealPtr real_pi() { return real_leaf(RealExpr::Kind::Pi); }
inline RealPtr real_euler() { return real_leaf(RealExpr::Kind::Euler); }

inline RealPtr real_nat(long long n) {
    auto r = std::make_shared<RealExpr>();
    r->kind = RealExpr::Kind::Natural;
    r->nat = n;
    return r;
}

inline RealPtr real_int_atom(IntPtr e) {
    auto r = std::make_shared<RealExpr>();
    r->kind = RealExpr::Kind::IntAtom;
    r->int_atom = std::move(e);
    return r;
}

inline RealPtr real_unop(RealExpr::Kind k, RealPtr a) {
    auto r = std::make_shared<RealExpr>();
    r->kind = k;
    r->lhs = std::move(a);
    return r;
}

inline RealPtr real_binop(RealExpr::Kind k, RealPtr a, RealPtr b) {
    auto r = std::make_shared<RealExpr>();
    r->kind = k;
    r->lhs = std::move(a);
    r->rhs = std::move(b);
    return r;
}

inline double eval_real(const RealPtr &r) {
    using K = RealExpr::Kind;
    switch (r->kind) {
    case K::Pi: return M_PI;
    case K::Euler: return M_E;
    case K::Natural: return static_cast<double>(r->nat);
    case K::Neg: return -eval_real(r->lhs);
    case K::Add: return eval_real(r->lhs) + eval_real(r->rhs);
    case K::Mul: return eval_real(r->lhs) * eval_real(r->rhs);
    case K::Div: {
        double denom = eval_real(r->rhs);
        if (denom == 0.0)
            throw DomainError("division by zero in real constant");
        return eval_real(r->lhs) / denom;
    }
    case K::Sin: return std::sin(eval_real(r->lhs));
    case K::Cos: return std::cos(eval_real(r->lhs));
    case K::Tan: {
        double x = eval_real(r->lhs);
        double c = std::cos(x);
        if (c == 0.0)
            throw DomainError("tan undefined at this argument");
        return std::tan(x);
    }
    case K::Arcsin: {
        double x = eval_real(r->lhs);
        if (x < -1.0 || x > 1.0)
            throw DomainError("arcsin argument outside [-1, 1]");
        return std::asin(x);
    }
    case K::Arccos: {
        double x = eval_real(r->lhs);
        if (x < -1.0 || x > 1.0)
            throw DomainError("arccos argument outside [-1, 1]");
        return std::acos(x);
    }
    case K::Arctan: return std::atan(eval_real(r->lhs));
    case K::Exp: return std::exp(eval_real(r->lhs));
    case K::Ln: {
        double x = eval_real(r->lhs);
        if (x <= 0.0)
            throw DomainError("ln of non-positive constant");
        return std::log(x);
    }
    case K::Sqrt: {
        double x = eval_real(r->lhs);
        if (x < 0.0)
            throw DomainError("sqrt of negative constant");
        return std::sqrt(x);
    }
    case K::IntAtom:
        throw InternalError("unresolved integer metavariable in real constant");
    }
    throw InternalError("unhandled real constant kind");
}

inline bool real_equal(const RealPtr &a, const RealPtr &b) {
    if (a.get() == b.get())
        return true;
    if (a->kind != b->kind)
        return false;
    using K = RealExpr::Kind;
    switch (a->kind) {
    case K::Pi:
    case K::Euler:
        return true;
    case K::Natural:
        return a->nat == b->nat;
    case K::Neg:
    case K::Sin: case K::Cos: case K::Tan:
    case K::Arcsin: case K::Arccos: case K::Arctan:
    case K::Exp: case K::Ln: case K::Sqrt:
        return real_equal(a->lhs, b->lhs);
    case K::Add: case K::Mul: case K::Div:
        return real_equal(a->lhs, b->lhs) && real_equal(a->rhs, b->rhs);
    case K::IntAtom:
        return false;
    }
    return false;
}

namespace detail {

inline int real_prec(RealExpr::Kind k) {
    using K = RealExpr::Kind;
    switch (k) {
    case K::Add: return 1;
    case K::Mul: case K::Div: return 2;
    case K::Neg: return 3;
    default: return 4;
    }
}

} // namespace detail

inline std::string print_real(const RealPtr &r, int parent_prec = 0) {
    using K = RealExpr::Kind;
    int prec = detail::real_prec(r->kind);
    std::string s;
    switch (r->kind) {
    case K::Pi: s = "pi"; break;
    case K::Euler: s = "euler"; break;
    case K::Natural: s = std::to_string(r->nat); break;
    case K::Neg: s = "-" + print_real(r->lhs, prec); break;
    case K::Add: s = print_real(r->lhs, prec) + " + " + print_real(r->rhs, prec + 1); break;
    case K::Mul: s = print_real(r->lhs, prec) + " * " + print_real(r->rhs, prec + 1); break;
    case K::Div: s = print_real(r->lhs, prec) + " / " + print_real(r->rhs, prec + 1); break;
    case K::Sin: s = "sin(" + print_real(r->lhs) + ")"; break;
    case K::Cos: s = "cos(" + print_real(r->lhs) + ")"; break;
    case K::Tan: s = "tan(" + print_real(r->lhs) + ")"; break;
    case K::Arcsin: s = "arcsin(" + print_real(r->lhs) + ")"; break;
    case K::Arccos: s = "arccos(" + print_real(r->lhs) + ")"; break;
    case K::Arctan: s = "arctan(" + print_real(r->lhs) + ")"; break;
    case K::Exp: s = "exp(" + print_real(r->lhs) + ")"; break;
    case K::Ln: s = "ln(" + print_real(r->lhs) + ")"; break;
    case K::Sqrt: s = "sqrt(" + print_real(r->lhs) + ")"; break;
    case K::IntAtom: s = "<int>"; break;
    }
    if (prec < parent_prec)
        return "(" + s + ")";
    return s;
}

} // namespace qunity
