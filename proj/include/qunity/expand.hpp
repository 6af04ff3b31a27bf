#pragma once

#include <map>
#include <string>
#include <vector>

#include "qunity/ast.hpp"
#include "qunity/surface.hpp"
#include "qunity/typecheck.hpp"

namespace qunity {

// Expands a surface program to base syntax: resolves definitions (including
// integer-parameterized clauses with recursion on 0 / n+k), eliminates all
// sugar (Bit, 0, 1, dagger, Maybe, tensor powers, gphase, |>, let,
// composition, fst/snd, had, plus, minus, equals, reflect), and validates
// real constants.

struct Expanded {
    enum class Cat { Type, Expr, Prog };
    Cat cat;
    TypePtr type;
    ExprPtr expr;
    ProgPtr prog;
};

inline Expanded expanded_type(TypePtr t) { return Expanded{Expanded::Cat::Type, std::move(t), nullptr, nullptr}; }
inline Expanded expanded_expr(ExprPtr e) { return Expanded{Expanded::Cat::Expr, nullptr, std::move(e), nullptr}; }
inline Expanded expanded_prog(ProgPtr p) { return Expanded{Expanded::Cat::Prog, nullptr, nullptr, std::move(p)}; }

class Expander {
public:
    explicit Expander(const SourceProgram &src) : src_(src) {
        for (const auto &d : src.defs) {
            if (is_reserved(d.name))
                throw ExpandError("definition '" + d.name + "' shadows a builtin name");
            defs_[d.name].push_back(&d);
        }
    }

    Expanded expand_main() {
        IntEnv env;
        return expand(src_.main_term, env);
    }

    ExprPtr expand_main_expr() {
        Expanded r = expand_main();
        if (r.cat != Expanded::Cat::Expr)
            throw ExpandError("entry point must be an expression");
        return r.expr;
    }

    using IntEnv = std::map<std::string, long long>;

    Expanded expand(const STermPtr &t, const IntEnv &env) {
        switch (t->kind) {
        case STerm::Kind::Unit:
            return expanded_expr(unit_expr());
        case STerm::Kind::VoidT:
            return expanded_type(void_type());
        case STerm::Kind::Nat:
            if (t->nat == 0)
                return expanded_expr(app_expr(left_prog(unit_type(), unit_type()), unit_expr()));
            if (t->nat == 1)
                return expanded_expr(app_expr(right_prog(unit_type(), unit_type()), unit_expr()));
            throw ExpandError("numeral " + std::to_string(t->nat) +
                              " is not a term (only the bits 0 and 1 are)");
        case STerm::Kind::Name:
            return expand_name(t, env);
        case STerm::Kind::Call:
            return expand_call(t, env);
        case STerm::Kind::Pair: {
            ExprPtr a = expect_expr(t->a, env, "pair component");
            ExprPtr b = expect_expr(t->b, env, "pair component");
            return expanded_expr(pair_expr(a, b));
        }
        case STerm::Kind::Try: {
            ExprPtr a = expect_expr(t->a, env, "try body");
            ExprPtr b = expect_expr(t->b, env, "catch body");
            return expanded_expr(try_expr(a, b));
        }
        case STerm::Kind::Ctrl: {
            ExprPtr scrut = expect_expr(t->scrutinee, env, "ctrl scrutinee");
            TypePtr st = expect_type(t->stype, env, "ctrl scrutinee type");
            TypePtr rt = expect_type(t->rtype, env, "ctrl result type");
            std::vector<CtrlBranch> branches;
            for (const auto &br : t->branches)
                branches.push_back(CtrlBranch{expect_expr(br.pattern, env, "ctrl pattern"),
                                              expect_expr(br.body, env, "ctrl body")});
            return expanded_expr(ctrl_expr(scrut, st, branches, rt));
        }
        case STerm::Kind::Lambda: {
            ExprPtr pat = expect_expr(t->a, env, "lambda pattern");
            TypePtr dom = expect_type(t->b, env, "lambda domain");
            ExprPtr body = expect_expr(t->c, env, "lambda body");
            return expanded_prog(abs_prog(pat, dom, body));
        }
        case STerm::Kind::Let: {
            // let p : T = e1 in e2  ==  e1 |> lambda p : T -> e2
            ExprPtr pat = expect_expr(t->a, env, "let pattern");
            TypePtr ty = expect_type(t->b, env, "let annotation");
            ExprPtr rhs = expect_expr(t->c, env, "let right-hand side");
            ExprPtr body = expect_expr(t->d, env, "let body");
            return expanded_expr(app_expr(abs_prog(pat, ty, body), rhs));
        }
        case STerm::Kind::U3:
            return expanded_prog(u3_prog(resolve_real(t->r0, env), resolve_real(t->r1, env),
                                         resolve_real(t->r2, env)));
        case STerm::Kind::Juxt: {
            ProgPtr f = expect_prog(t->a, env, "applied term");
            ExprPtr e = expect_expr(t->b, env, "argument");
            return expanded_expr(app_expr(f, e));
        }
        case STerm::Kind::Pipe: {
            ExprPtr e = expect_expr(t->a, env, "pipeline input");
            ProgPtr f = expect_prog(t->b, env, "pipeline stage");
            return expanded_expr(app_expr(f, e));
        }
        case STerm::Kind::Dagger: {
            // dagger f  ==  lambda (f x) : cod(f) -> x
            ProgPtr f = expect_prog(t->a, env, "dagger operand");
            ProgType ft = infer_prog(f)->prog_type;
            if (!ft.coherent)
                throw ExpandError("dagger of a quantum channel is not defined");
            ExprPtr x = var_expr("x");
            return expanded_prog(abs_prog(app_expr(f, x), ft.codomain, x));
        }
        case STerm::Kind::Compose: {
            // f . g  ==  lambda x : dom(g) -> f (g x)
            ProgPtr f = expect_prog(t->a, env, "composition operand");
            ProgPtr g = expect_prog(t->b, env, "composition operand");
            ProgType gt = infer_prog(g)->prog_type;
            ExprPtr x = var_expr("x");
            return expanded_prog(abs_prog(x, gt.domain, app_expr(f, app_expr(g, x))));
        }
        case STerm::Kind::SumT: {
            TypePtr a = expect_type(t->a, env, "sum operand");
            TypePtr b = expect_type(t->b, env, "sum operand");
            return expanded_type(sum_type(a, b));
        }
        case STerm::Kind::ProdT: {
            TypePtr a = expect_type(t->a, env, "product operand");
            TypePtr b = expect_type(t->b, env, "product operand");
            return expanded_type(prod_type(a, b));
        }
        case STerm::Kind::Power: {
            long long n = eval_int(t->power, env);
            Expanded base = expand(t->a, env);
            if (base.cat == Expanded::Cat::Type) {
                TypePtr r = unit_type();
                for (long long i = 0; i < n; ++i)
                    r = prod_type(base.type, r);
                return expanded_type(r);
            }
            if (base.cat == Expanded::Cat::Expr) {
                ExprPtr r = unit_expr();
                for (long long i = 0; i < n; ++i)
                    r = pair_expr(base.expr, r);
                return expanded_expr(r);
            }
            throw ExpandError("tensor power of a program is not defined");
        }
        }
        throw InternalError("unhandled surface term kind");
    }

    long long eval_int(const IntPtr &e, const IntEnv &env) {
        switch (e->kind) {
        case IntExpr::Kind::Nat:
            return e->nat;
        case IntExpr::Kind::Var: {
            auto it = env.find(e->var);
            if (it == env.end())
                throw ExpandError("unknown integer metavariable '" + e->var + "'");
            return it->second;
        }
        case IntExpr::Kind::Add:
            return eval_int(e->lhs, env) + eval_int(e->rhs, env);
        case IntExpr::Kind::Mul:
            return eval_int(e->lhs, env) * eval_int(e->rhs, env);
        case IntExpr::Kind::Pow: {
            long long b = eval_int(e->lhs, env);
            long long x = eval_int(e->rhs, env);
            long long r = 1;
            for (long long i = 0; i < x; ++i)
                r *= b;
            return r;
        }
        }
        throw InternalError("unhandled integer expression kind");
    }

private:
    static bool is_reserved(const std::string &name) {
        static const char *names[] = {"Bit", "Void", "had", "plus", "minus", "Maybe",
                                      "nothing", "just", "left", "right", "fst", "snd",
                                      "equals", "reflect", "gphase", "rphase", "u3"};
        for (const char *n : names)
            if (name == n)
                return true;
        return false;
    }

    Expanded expand_name(const STermPtr &t, const IntEnv &env) {
        const std::string &name = t->name;
        if (name == "Bit")
            return expanded_type(bit_type());
        if (name == "had")
            return expanded_prog(had_prog());
        if (name == "plus")
            return expanded_expr(app_expr(had_prog(), bit_expr(false)));
        if (name == "minus")
            return expanded_expr(app_expr(had_prog(), bit_expr(true)));
        auto it = defs_.find(name);
        if (it != defs_.end())
            return expand_def(name, false, 0, t);
        // unbound names denote variables (they may be bound by an enclosing
        // pattern once type checking runs)
        if (env.count(name))
            throw ExpandError("integer metavariable '" + name + "' used as a term");
        return expanded_expr(var_expr(name));
    }

    Expanded expand_call(const STermPtr &t, const IntEnv &env) {
        const std::string &name = t->name;
        auto type_arg = [&](std::size_t i) {
            return expect_type(t->args[i].term, env, "bracket argument");
        };
        auto expr_arg = [&](std::size_t i) {
            return expect_expr(t->args[i].term, env, "bracket argument");
        };
        if (name == "left" || name == "right") {
            TypePtr t0, t1;
            if (t->args.size() == 1) {
                TypePtr s = type_arg(0);
                if (s->kind != DataType::Kind::Sum)
                    throw ExpandError(name + "[T] requires T to be a sum type, got " +
                                      print_type(s));
                t0 = s->left;
                t1 = s->right;
            } else {
                t0 = type_arg(0);
                t1 = type_arg(1);
            }
            return expanded_prog(name == "left" ? left_prog(t0, t1) : right_prog(t0, t1));
        }
        if (name == "Maybe")
            return expanded_type(sum_type(unit_type(), type_arg(0)));
        if (name == "nothing") {
            TypePtr a = type_arg(0);
            return expanded_expr(app_expr(left_prog(unit_type(), a), unit_expr()));
        }
        if (name == "just")
            return expanded_prog(right_prog(unit_type(), type_arg(0)));
        if (name == "fst" || name == "snd") {
            TypePtr t0 = type_arg(0);
            TypePtr t1 = type_arg(1);
            ExprPtr x0 = var_expr("x0");
            ExprPtr x1 = var_expr("x1");
            return expanded_prog(abs_prog(pair_expr(x0, x1), prod_type(t0, t1),
                                          name == "fst" ? x0 : x1));
        }
        if (name == "equals") {
            // lambda x : T -> try (x |> lambda e : T -> 1) catch 0
            TypePtr ty = type_arg(0);
            ExprPtr e = expr_arg(1);
            ExprPtr x = var_expr("x");
            ExprPtr tried = app_expr(abs_prog(e, ty, bit_expr(true)), x);
            return expanded_prog(abs_prog(x, ty, try_expr(tried, bit_expr(false))));
        }
        if (name == "reflect") {
            TypePtr ty = type_arg(0);
            ExprPtr e = expr_arg(1);
            return expanded_prog(rphase_prog(ty, e, real_nat(0), real_pi()));
        }
        if (name == "gphase") {
            TypePtr ty = type_arg(0);
            RealPtr r = resolve_real(t->args[1].real, env);
            return expanded_prog(rphase_prog(ty, var_expr("x"), r, r));
        }
        if (name == "rphase") {
            TypePtr ty = type_arg(0);
            ExprPtr e = expr_arg(1);
            RealPtr r0 = resolve_real(t->args[2].real, env);
            RealPtr r1 = resolve_real(t->args[3].real, env);
            return expanded_prog(rphase_prog(ty, e, r0, r1));
        }
        if (!defs_.count(name))
            throw ExpandError("unknown definition '" + name + "'");
        long long arg = eval_int(t->args[0].iexpr, env);
        if (arg < 0)
            throw ExpandError("negative argument to definition '" + name + "'");
        return expand_def(name, true, arg, t);
    }

    Expanded expand_def(const std::string &name, bool has_arg, long long arg,
                        const STermPtr &site) {
        auto mit = memo_.find({name, has_arg ? arg : -1});
        if (mit != memo_.end())
            return mit->second;
        const SDefn *clause = nullptr;
        IntEnv env;
        for (const SDefn *d : defs_.at(name)) {
            if (!has_arg) {
                if (d->param_kind == SDefn::ParamKind::None) {
                    clause = d;
                    break;
                }
                throw ExpandError("definition '" + name + "' requires an integer argument");
            }
            if (d->param_kind == SDefn::ParamKind::None)
                throw ExpandError("definition '" + name + "' takes no integer argument");
            if (d->param_kind == SDefn::ParamKind::Lit && d->lit == arg) {
                clause = d;
                break;
            }
        }
        if (!clause && has_arg) {
            // fall back to the n+k clause with the largest matching offset
            long long best = -1;
            for (const SDefn *d : defs_.at(name)) {
                if (d->param_kind == SDefn::ParamKind::VarPlus && arg >= d->plus &&
                    d->plus > best) {
                    best = d->plus;
                    clause = d;
                }
            }
            if (clause)
                env[clause->pvar] = arg - clause->plus;
        }
        if (!clause)
            throw ExpandError("no clause of definition '" + name + "' matches argument " +
                              std::to_string(arg) +
                              (site ? " (line " + std::to_string(site->line) + ")" : ""));
        for (const auto &[frame_name, frame_arg] : stack_) {
            if (frame_name == name && (!has_arg || frame_arg <= arg))
                throw ExpandError("definition '" + name +
                                  "' recurses without a decreasing integer argument");
        }
        stack_.push_back({name, has_arg ? arg : -1});
        Expanded result = expand(clause->body, env);
        stack_.pop_back();
        memo_[{name, has_arg ? arg : -1}] = result;
        return result;
    }

    ExprPtr expect_expr(const STermPtr &t, const IntEnv &env, const char *what) {
        Expanded r = expand(t, env);
        if (r.cat != Expanded::Cat::Expr)
            throw ExpandError(std::string(what) + " must be an expression");
        return r.expr;
    }

    TypePtr expect_type(const STermPtr &t, const IntEnv &env, const char *what) {
        // "()" is both the unit type and the unit value; type position decides
        if (t->kind == STerm::Kind::Unit)
            return unit_type();
        Expanded r = expand(t, env);
        if (r.cat != Expanded::Cat::Type)
            throw ExpandError(std::string(what) + " must be a type");
        return r.type;
    }

    ProgPtr expect_prog(const STermPtr &t, const IntEnv &env, const char *what) {
        Expanded r = expand(t, env);
        if (r.cat != Expanded::Cat::Prog)
            throw ExpandError(std::string(what) + " must be a program");
        return r.prog;
    }

    static ProgPtr had_prog() {
        return u3_prog(real_binop(RealExpr::Kind::Div, real_pi(), real_nat(2)), real_nat(0),
                       real_pi());
    }

    static ExprPtr bit_expr(bool one) {
        return app_expr(one ? right_prog(unit_type(), unit_type())
                            : left_prog(unit_type(), unit_type()),
                        unit_expr());
    }

    // Substitutes integer metavariables and validates the constant.
    RealPtr resolve_real(const RealPtr &r, const IntEnv &env) {
        RealPtr resolved = substitute_real(r, env);
        eval_real(resolved); // catches 1/0, ln(0), sqrt(-1), ... now
        return resolved;
    }

    RealPtr substitute_real(const RealPtr &r, const IntEnv &env) {
        using K = RealExpr::Kind;
        switch (r->kind) {
        case K::Pi: case K::Euler: case K::Natural:
            return r;
        case K::IntAtom:
            return real_nat(eval_int(r->int_atom, env));
        case K::Neg: case K::Sin: case K::Cos: case K::Tan:
        case K::Arcsin: case K::Arccos: case K::Arctan:
        case K::Exp: case K::Ln: case K::Sqrt:
            return real_unop(r->kind, substitute_real(r->lhs, env));
        case K::Add: case K::Mul: case K::Div:
            return real_binop(r->kind, substitute_real(r->lhs, env),
                              substitute_real(r->rhs, env));
        }
        throw InternalError("unhandled real constant kind");
    }

    const SourceProgram &src_;
    std::map<std::string, std::vector<const SDefn *>> defs_;
    std::map<std::pair<std::string, long long>, Expanded> memo_;
    std::vector<std::pair<std::string, long long>> stack_;
};

inline Expanded expand(const SourceProgram &src) {
    Expander ex(src);
    return ex.expand_main();
}

} // namespace qunity
