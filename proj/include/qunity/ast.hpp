#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qunity/error.hpp"
#include "qunity/real.hpp"

namespace qunity {

// ---------------------------------------------------------------------------
// Data types
// ---------------------------------------------------------------------------

struct DataType;
using TypePtr = std::shared_ptr<const DataType>;

struct DataType {
    enum class Kind { Void, Unit, Sum, Prod };
    Kind kind;
    TypePtr left, right;
};

inline TypePtr void_type() {
    static TypePtr t = [] {
        auto p = std::make_shared<DataType>();
        p->kind = DataType::Kind::Void;
        return p;
    }();
    return t;
}

inline TypePtr unit_type() {
    static TypePtr t = [] {
        auto p = std::make_shared<DataType>();
        p->kind = DataType::Kind::Unit;
        return p;
    }();
    return t;
}

inline TypePtr sum_type(TypePtr a, TypePtr b) {
    auto p = std::make_shared<DataType>();
    p->kind = DataType::Kind::Sum;
    p->left = std::move(a);
    p->right = std::move(b);
    return p;
}

inline TypePtr prod_type(TypePtr a, TypePtr b) {
    auto p = std::make_shared<DataType>();
    p->kind = DataType::Kind::Prod;
    p->left = std::move(a);
    p->right = std::move(b);
    return p;
}

inline TypePtr bit_type() { return sum_type(unit_type(), unit_type()); }

inline bool type_equal(const TypePtr &a, const TypePtr &b) {
    if (a.get() == b.get())
        return true;
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case DataType::Kind::Void:
    case DataType::Kind::Unit:
        return true;
    default:
        return type_equal(a->left, b->left) && type_equal(a->right, b->right);
    }
}

inline std::uint64_t cardinality(const TypePtr &t) {
    switch (t->kind) {
    case DataType::Kind::Void: return 0;
    case DataType::Kind::Unit: return 1;
    case DataType::Kind::Sum: return cardinality(t->left) + cardinality(t->right);
    case DataType::Kind::Prod: return cardinality(t->left) * cardinality(t->right);
    }
    throw InternalError("unhandled type kind");
}

// Number of qubits used to encode a value of the type.
inline int type_size(const TypePtr &t) {
    switch (t->kind) {
    case DataType::Kind::Void: return 0;
    case DataType::Kind::Unit: return 0;
    case DataType::Kind::Sum:
        return 1 + std::max(type_size(t->left), type_size(t->right));
    case DataType::Kind::Prod:
        return type_size(t->left) + type_size(t->right);
    }
    throw InternalError("unhandled type kind");
}

inline std::string print_type(const TypePtr &t, int parent_prec = 0) {
    // precedence: (+) = 1, (x) = 2, atoms = 3; both operators right-assoc
    switch (t->kind) {
    case DataType::Kind::Void: return "Void";
    case DataType::Kind::Unit: return "()";
    case DataType::Kind::Sum: {
        if (t->left->kind == DataType::Kind::Unit && t->right->kind == DataType::Kind::Unit)
            return "Bit";
        std::string s = print_type(t->left, 2) + " (+) " + print_type(t->right, 1);
        return parent_prec > 1 ? "(" + s + ")" : s;
    }
    case DataType::Kind::Prod: {
        std::string s = print_type(t->left, 3) + " (x) " + print_type(t->right, 2);
        return parent_prec > 2 ? "(" + s + ")" : s;
    }
    }
    throw InternalError("unhandled type kind");
}

// Program classification: a coherent map (Kraus operator) or a quantum
// channel (trace-non-increasing superoperator).
struct ProgType {
    bool coherent = true;
    TypePtr domain, codomain;
};

inline std::string print_prog_type(const ProgType &f) {
    return print_type(f.domain) + (f.coherent ? " ~> " : " ==> ") + print_type(f.codomain);
}

// ---------------------------------------------------------------------------
// Expressions and programs (base syntax, after sugar expansion)
// ---------------------------------------------------------------------------

struct Expr;
struct Prog;
using ExprPtr = std::shared_ptr<const Expr>;
using ProgPtr = std::shared_ptr<const Prog>;

struct CtrlBranch {
    ExprPtr pattern;
    ExprPtr body;
};

struct Expr {
    enum class Kind { Unit, Var, Pair, Ctrl, TryCatch, App };
    Kind kind;
    std::string var;                   // Var
    ExprPtr first, second;             // Pair / TryCatch (try, catch)
    ExprPtr scrutinee;                 // Ctrl
    TypePtr scrutinee_type;            // Ctrl
    std::vector<CtrlBranch> branches;  // Ctrl (may be empty)
    TypePtr result_type;               // Ctrl
    ProgPtr prog;                      // App
    ExprPtr arg;                       // App
};

struct Prog {
    enum class Kind { U3, Left, Right, Abs, Rphase };
    Kind kind;
    RealPtr theta, phi, lam;     // U3
    TypePtr t0, t1;              // Left / Right: T0 ~> T0 (+) T1 resp. T1 ~> T0 (+) T1
    ExprPtr pattern;             // Abs / Rphase
    TypePtr domain;              // Abs / Rphase annotation
    ExprPtr body;                // Abs
    RealPtr r_match, r_ortho;    // Rphase
};

inline ExprPtr unit_expr() {
    static ExprPtr e = [] {
        auto p = std::make_shared<Expr>();
        p->kind = Expr::Kind::Unit;
        return p;
    }();
    return e;
}

inline ExprPtr var_expr(std::string name) {
    auto p = std::make_shared<Expr>();
    p->kind = Expr::Kind::Var;
    p->var = std::move(name);
    return p;
}

inline ExprPtr pair_expr(ExprPtr a, ExprPtr b) {
    auto p = std::make_shared<Expr>();
    p->kind = Expr::Kind::Pair;
    p->first = std::move(a);
    p->second = std::move(b);
    return p;
}

inline ExprPtr ctrl_expr(ExprPtr scrutinee, TypePtr scrutinee_type,
                         std::vector<CtrlBranch> branches, TypePtr result_type) {
    auto p = std::make_shared<Expr>();
    p->kind = Expr::Kind::Ctrl;
    p->scrutinee = std::move(scrutinee);
    p->scrutinee_type = std::move(scrutinee_type);
    p->branches = std::move(branches);
    p->result_type = std::move(result_type);
    return p;
}

inline ExprPtr try_expr(ExprPtr try_body, ExprPtr catch_body) {
    auto p = std::make_shared<Expr>();
    p->kind = Expr::Kind::TryCatch;
    p->first = std::move(try_body);
    p->second = std::move(catch_body);
    return p;
}

inline ExprPtr app_expr(ProgPtr f, ExprPtr e) {
    auto p = std::make_shared<Expr>();
    p->kind = Expr::Kind::App;
    p->prog = std::move(f);
    p->arg = std::move(e);
    return p;
}

inline ProgPtr u3_prog(RealPtr theta, RealPtr phi, RealPtr lam) {
    auto p = std::make_shared<Prog>();
    p->kind = Prog::Kind::U3;
    p->theta = std::move(theta);
    p->phi = std::move(phi);
    p->lam = std::move(lam);
    return p;
}

inline ProgPtr left_prog(TypePtr t0, TypePtr t1) {
    auto p = std::make_shared<Prog>();
    p->kind = Prog::Kind::Left;
    p->t0 = std::move(t0);
    p->t1 = std::move(t1);
    return p;
}

inline ProgPtr right_prog(TypePtr t0, TypePtr t1) {
    auto p = std::make_shared<Prog>();
    p->kind = Prog::Kind::Right;
    p->t0 = std::move(t0);
    p->t1 = std::move(t1);
    return p;
}

inline ProgPtr abs_prog(ExprPtr pattern, TypePtr domain, ExprPtr body) {
    auto p = std::make_shared<Prog>();
    p->kind = Prog::Kind::Abs;
    p->pattern = std::move(pattern);
    p->domain = std::move(domain);
    p->body = std::move(body);
    return p;
}

inline ProgPtr rphase_prog(TypePtr domain, ExprPtr pattern, RealPtr r_match, RealPtr r_ortho) {
    auto p = std::make_shared<Prog>();
    p->kind = Prog::Kind::Rphase;
    p->domain = std::move(domain);
    p->pattern = std::move(pattern);
    p->r_match = std::move(r_match);
    p->r_ortho = std::move(r_ortho);
    return p;
}

bool prog_equal(const ProgPtr &a, const ProgPtr &b);

inline bool expr_equal(const ExprPtr &a, const ExprPtr &b) {
    if (a.get() == b.get())
        return true;
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case Expr::Kind::Unit:
        return true;
    case Expr::Kind::Var:
        return a->var == b->var;
    case Expr::Kind::Pair:
    case Expr::Kind::TryCatch:
        return expr_equal(a->first, b->first) && expr_equal(a->second, b->second);
    case Expr::Kind::Ctrl: {
        if (!expr_equal(a->scrutinee, b->scrutinee) ||
            !type_equal(a->scrutinee_type, b->scrutinee_type) ||
            !type_equal(a->result_type, b->result_type) ||
            a->branches.size() != b->branches.size())
            return false;
        for (std::size_t i = 0; i < a->branches.size(); ++i)
            if (!expr_equal(a->branches[i].pattern, b->branches[i].pattern) ||
                !expr_equal(a->branches[i].body, b->branches[i].body))
                return false;
        return true;
    }
    case Expr::Kind::App:
        return prog_equal(a->prog, b->prog) && expr_equal(a->arg, b->arg);
    }
    return false;
}

inline bool prog_equal(const ProgPtr &a, const ProgPtr &b) {
    if (a.get() == b.get())
        return true;
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case Prog::Kind::U3:
        return real_equal(a->theta, b->theta) && real_equal(a->phi, b->phi) &&
               real_equal(a->lam, b->lam);
    case Prog::Kind::Left:
    case Prog::Kind::Right:
        return type_equal(a->t0, b->t0) && type_equal(a->t1, b->t1);
    case Prog::Kind::Abs:
        return expr_equal(a->pattern, b->pattern) && type_equal(a->domain, b->domain) &&
               expr_equal(a->body, b->body);
    case Prog::Kind::Rphase:
        return type_equal(a->domain, b->domain) && expr_equal(a->pattern, b->pattern) &&
               real_equal(a->r_match, b->r_match) && real_equal(a->r_ortho, b->r_ortho);
    }
    return false;
}

// All identifiers occurring in an expression. Expressions have no binders;
// ctrl branch patterns bind in their bodies only through the typing rules.
inline void free_vars_into(const ExprPtr &e, std::set<std::string> &out) {
    switch (e->kind) {
    case Expr::Kind::Unit:
        return;
    case Expr::Kind::Var:
        out.insert(e->var);
        return;
    case Expr::Kind::Pair:
    case Expr::Kind::TryCatch:
        free_vars_into(e->first, out);
        free_vars_into(e->second, out);
        return;
    case Expr::Kind::Ctrl:
        free_vars_into(e->scrutinee, out);
        for (const auto &br : e->branches) {
            free_vars_into(br.pattern, out);
            free_vars_into(br.body, out);
        }
        return;
    case Expr::Kind::App:
        free_vars_into(e->arg, out);
        return;
    }
}

inline std::set<std::string> free_vars(const ExprPtr &e) {
    std::set<std::string> out;
    free_vars_into(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Values — classical basis elements of a type
// ---------------------------------------------------------------------------

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct Value {
    enum class Kind { Unit, Left, Right, Pair };
    Kind kind;
    TypePtr type;           // the type this value inhabits
    ValuePtr inner;         // Left / Right
    ValuePtr first, second; // Pair
};

inline ValuePtr unit_value() {
    static ValuePtr v = [] {
        auto p = std::make_shared<Value>();
        p->kind = Value::Kind::Unit;
        p->type = unit_type();
        return p;
    }();
    return v;
}

inline ValuePtr left_value(ValuePtr inner, const TypePtr &sum) {
    auto p = std::make_shared<Value>();
    p->kind = Value::Kind::Left;
    p->type = sum;
    p->inner = std::move(inner);
    return p;
}

inline ValuePtr right_value(ValuePtr inner, const TypePtr &sum) {
    auto p = std::make_shared<Value>();
    p->kind = Value::Kind::Right;
    p->type = sum;
    p->inner = std::move(inner);
    return p;
}

inline ValuePtr pair_value(ValuePtr a, ValuePtr b) {
    auto p = std::make_shared<Value>();
    p->kind = Value::Kind::Pair;
    p->type = prod_type(a->type, b->type);
    p->first = std::move(a);
    p->second = std::move(b);
    return p;
}

inline bool value_equal(const ValuePtr &a, const ValuePtr &b) {
    if (a.get() == b.get())
        return true;
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case Value::Kind::Unit: return true;
    case Value::Kind::Left:
    case Value::Kind::Right: return value_equal(a->inner, b->inner);
    case Value::Kind::Pair:
        return value_equal(a->first, b->first) && value_equal(a->second, b->second);
    }
    return false;
}

// Canonical basis order: Unit yields its single value, sums list all
// left-injected values then all right-injected ones, products nest
// lexicographically with the first component outermost. All matrix and
// register indexing relies on this order.
inline std::vector<ValuePtr> values_of(const TypePtr &t) {
    std::vector<ValuePtr> out;
    switch (t->kind) {
    case DataType::Kind::Void:
        break;
    case DataType::Kind::Unit:
        out.push_back(unit_value());
        break;
    case DataType::Kind::Sum: {
        for (auto &v : values_of(t->left))
            out.push_back(left_value(v, t));
        for (auto &v : values_of(t->right))
            out.push_back(right_value(v, t));
        break;
    }
    case DataType::Kind::Prod: {
        auto lefts = values_of(t->left);
        auto rights = values_of(t->right);
        for (auto &a : lefts)
            for (auto &b : rights)
                out.push_back(pair_value(a, b));
        break;
    }
    }
    return out;
}

// Index of a value within values_of(its type), without enumerating.
inline std::uint64_t value_index(const ValuePtr &v) {
    switch (v->kind) {
    case Value::Kind::Unit:
        return 0;
    case Value::Kind::Left:
        return value_index(v->inner);
    case Value::Kind::Right:
        return cardinality(v->type->left) + value_index(v->inner);
    case Value::Kind::Pair:
        return value_index(v->first) * cardinality(v->type->right) + value_index(v->second);
    }
    throw InternalError("unhandled value kind");
}

inline ValuePtr value_at(const TypePtr &t, std::uint64_t index) {
    switch (t->kind) {
    case DataType::Kind::Void:
        throw InternalError("no values inhabit Void");
    case DataType::Kind::Unit:
        return unit_value();
    case DataType::Kind::Sum: {
        std::uint64_t nl = cardinality(t->left);
        if (index < nl)
            return left_value(value_at(t->left, index), t);
        return right_value(value_at(t->right, index - nl), t);
    }
    case DataType::Kind::Prod: {
        std::uint64_t nr = cardinality(t->right);
        return pair_value(value_at(t->left, index / nr), value_at(t->right, index % nr));
    }
    }
    throw InternalError("unhandled type kind");
}

// Bitstring encoding of a value, of length type_size(type). A sum writes its
// tag bit, then the payload, then zero-fills the remaining low-order
// positions; a pair concatenates; unit is empty.
inline void encode_into(const ValuePtr &v, std::string &out) {
    switch (v->kind) {
    case Value::Kind::Unit:
        return;
    case Value::Kind::Left:
    case Value::Kind::Right: {
        out.push_back(v->kind == Value::Kind::Left ? '0' : '1');
        std::size_t before = out.size();
        encode_into(v->inner, out);
        std::size_t payload = out.size() - before;
        int width = type_size(v->type) - 1;
        out.append(static_cast<std::size_t>(width) - payload, '0');
        return;
    }
    case Value::Kind::Pair:
        encode_into(v->first, out);
        encode_into(v->second, out);
        return;
    }
}

inline std::string encode(const ValuePtr &v) {
    std::string out;
    out.reserve(static_cast<std::size_t>(type_size(v->type)));
    encode_into(v, out);
    return out;
}

inline bool value_inhabits(const ValuePtr &v, const TypePtr &t) {
    switch (t->kind) {
    case DataType::Kind::Void:
        return false;
    case DataType::Kind::Unit:
        return v->kind == Value::Kind::Unit;
    case DataType::Kind::Sum:
        if (v->kind == Value::Kind::Left)
            return value_inhabits(v->inner, t->left);
        if (v->kind == Value::Kind::Right)
            return value_inhabits(v->inner, t->right);
        return false;
    case DataType::Kind::Prod:
        return v->kind == Value::Kind::Pair && value_inhabits(v->first, t->left) &&
               value_inhabits(v->second, t->right);
    }
    return false;
}

// A value rendered back as a closed expression (used for printing and for the
// classical interpreter's results).
inline ExprPtr value_to_expr(const ValuePtr &v) {
    switch (v->kind) {
    case Value::Kind::Unit:
        return unit_expr();
    case Value::Kind::Left:
        return app_expr(left_prog(v->type->left, v->type->right), value_to_expr(v->inner));
    case Value::Kind::Right:
        return app_expr(right_prog(v->type->left, v->type->right), value_to_expr(v->inner));
    case Value::Kind::Pair:
        return pair_expr(value_to_expr(v->first), value_to_expr(v->second));
    }
    throw InternalError("unhandled value kind");
}

// ---------------------------------------------------------------------------
// Contexts and valuations
// ---------------------------------------------------------------------------

struct Binding {
    std::string name;
    TypePtr type;
};

using Context = std::vector<Binding>;

struct ValBinding {
    std::string name;
    ValuePtr value;
};

using Valuation = std::vector<ValBinding>;

inline bool context_wellformed(const Context &ctx) {
    std::set<std::string> seen;
    for (const auto &b : ctx)
        if (!seen.insert(b.name).second)
            return false;
    return true;
}

inline bool context_equal(const Context &a, const Context &b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].name != b[i].name || !type_equal(a[i].type, b[i].type))
            return false;
    return true;
}

inline int context_find(const Context &ctx, const std::string &name) {
    for (std::size_t i = 0; i < ctx.size(); ++i)
        if (ctx[i].name == name)
            return static_cast<int>(i);
    return -1;
}

inline std::uint64_t context_dimension(const Context &ctx) {
    std::uint64_t d = 1;
    for (const auto &b : ctx)
        d *= cardinality(b.type);
    return d;
}

inline int context_size(const Context &ctx) {
    int s = 0;
    for (const auto &b : ctx)
        s += type_size(b.type);
    return s;
}

// Qubit offset of the i-th binding within the context register.
inline int context_offset(const Context &ctx, std::size_t i) {
    int s = 0;
    for (std::size_t k = 0; k < i; ++k)
        s += type_size(ctx[k].type);
    return s;
}

// Mixed-radix index of a valuation, first binding outermost.
inline std::uint64_t valuation_index(const Context &ctx, const Valuation &val) {
    if (ctx.size() != val.size())
        throw InternalError("valuation does not match context length");
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < ctx.size(); ++i)
        idx = idx * cardinality(ctx[i].type) + value_index(val[i].value);
    return idx;
}

inline Valuation valuation_at(const Context &ctx, std::uint64_t index) {
    Valuation val(ctx.size());
    for (std::size_t i = ctx.size(); i-- > 0;) {
        std::uint64_t c = cardinality(ctx[i].type);
        val[i] = ValBinding{ctx[i].name, value_at(ctx[i].type, index % c)};
        index /= c;
    }
    return val;
}

inline Valuation concat_valuation(const Valuation &a, const Valuation &b) {
    Valuation out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Recovers the premise valuation of an explicit exchange node, where
// conclusion[i] = premise[perm[i]].
inline Valuation unpermute_valuation(const Valuation &conclusion,
                                     const std::vector<int> &perm) {
    Valuation premise(conclusion.size());
    for (std::size_t i = 0; i < conclusion.size(); ++i)
        premise[static_cast<std::size_t>(perm[i])] = conclusion[i];
    return premise;
}

inline const ValuePtr &valuation_lookup(const Valuation &val, const std::string &name) {
    for (const auto &b : val)
        if (b.name == name)
            return b.value;
    throw InternalError("variable " + name + " not bound in valuation");
}

inline std::string print_context(const Context &ctx) {
    if (ctx.empty())
        return ".";
    std::string s;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        if (i)
            s += ", ";
        s += ctx[i].name + " : " + print_type(ctx[i].type);
    }
    return s;
}

} // namespace qunity
