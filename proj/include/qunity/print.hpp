#pragma once

#include <string>

#include "qunity/ast.hpp"

namespace qunity {

// Prints base-syntax terms in the surface grammar, so that parsing the
// printed form of an expanded term yields the same term.
//
// Precedence levels used while printing:
//   0 full term (lambda bodies, branch bodies, parenthesized positions)
//   1 juxtaposition (application)
//   2 atom

std::string print_expr(const ExprPtr &e, int prec = 0);
std::string print_prog(const ProgPtr &p, int prec = 0);

inline std::string print_prog(const ProgPtr &p, int prec) {
    switch (p->kind) {
    case Prog::Kind::U3:
        return "u3(" + print_real(p->theta) + ", " + print_real(p->phi) + ", " +
               print_real(p->lam) + ")";
    case Prog::Kind::Left:
        return "left[" + print_type(p->t0) + ", " + print_type(p->t1) + "]";
    case Prog::Kind::Right:
        return "right[" + print_type(p->t0) + ", " + print_type(p->t1) + "]";
    case Prog::Kind::Abs: {
        std::string s = "lambda " + print_expr(p->pattern, 1) + " : " +
                        print_type(p->domain) + " -> " + print_expr(p->body, 0);
        return prec > 0 ? "(" + s + ")" : s;
    }
    case Prog::Kind::Rphase:
        return "rphase[" + print_type(p->domain) + ", " + print_expr(p->pattern, 0) +
               ", " + print_real(p->r_match) + ", " + print_real(p->r_ortho) + "]";
    }
    throw InternalError("unhandled prog kind");
}

inline std::string print_expr(const ExprPtr &e, int prec) {
    switch (e->kind) {
    case Expr::Kind::Unit:
        return "()";
    case Expr::Kind::Var:
        return e->var;
    case Expr::Kind::Pair:
        return "(" + print_expr(e->first, 0) + ", " + print_expr(e->second, 0) + ")";
    case Expr::Kind::Ctrl: {
        std::string s = "ctrl " + print_expr(e->scrutinee, 1) + " : " +
                        print_type(e->scrutinee_type) + " {";
        for (std::size_t i = 0; i < e->branches.size(); ++i) {
            if (i)
                s += " |";
            s += " " + print_expr(e->branches[i].pattern, 0) + " => " +
                 print_expr(e->branches[i].body, 0);
        }
        s += e->branches.empty() ? "} : " : " } : ";
        s += print_type(e->result_type);
        return prec > 0 ? "(" + s + ")" : s;
    }
    case Expr::Kind::TryCatch: {
        std::string s = "try " + print_expr(e->first, 0) + " catch " + print_expr(e->second, 0);
        return prec > 0 ? "(" + s + ")" : s;
    }
    case Expr::Kind::App: {
        // the bit literals
        if (e->arg->kind == Expr::Kind::Unit &&
            (e->prog->kind == Prog::Kind::Left || e->prog->kind == Prog::Kind::Right) &&
            e->prog->t0->kind == DataType::Kind::Unit &&
            e->prog->t1->kind == DataType::Kind::Unit)
            return e->prog->kind == Prog::Kind::Left ? "0" : "1";
        std::string s = print_prog(e->prog, 1) + " " + print_expr(e->arg, 2);
        return prec > 1 ? "(" + s + ")" : s;
    }
    }
    throw InternalError("unhandled expr kind");
}

inline std::string print_value(const ValuePtr &v) { return print_expr(value_to_expr(v), 0); }

} // namespace qunity
