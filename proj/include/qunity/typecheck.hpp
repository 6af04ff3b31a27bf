#pragma once

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "qunity/ast.hpp"
#include "qunity/print.hpp"

namespace qunity {

// ---------------------------------------------------------------------------
// Certificates for the spanning / orthogonality / erasure side judgments
// ---------------------------------------------------------------------------

struct SpanningCert;
using SpanPtr = std::shared_ptr<const SpanningCert>;

// A derivation of "the pattern list spans type T". `patterns` is the list the
// certificate derives, in the certificate's own order.
struct SpanningCert {
    enum class Kind { Void, Unit, Var, Sum, Pair, Perm };
    Kind kind;
    TypePtr type;
    std::vector<ExprPtr> patterns;

    SpanPtr left, right;          // Sum
    SpanPtr base;                 // Pair: spanning of first components
    std::vector<SpanPtr> groups;  // Pair: per first-component spanning of seconds
    std::vector<int> perm;        // Perm: patterns[i] = inner->patterns[perm[i]]
    SpanPtr inner;                // Perm
};

// Orthogonality: the input patterns (kept, in input order) form a subsequence
// of a spanning list; `dropped` holds the completion patterns.
struct OrthoCert {
    TypePtr type;
    std::vector<ExprPtr> kept;
    std::vector<ExprPtr> dropped;
    std::vector<Context> kept_ctx;
    std::vector<Context> dropped_ctx;
    // Derives kept ++ dropped (a Perm node at the root when reordering was
    // needed).
    SpanPtr spanning;
};

using OrthoPtr = std::shared_ptr<const OrthoCert>;

struct ErasesCert;
using ErasePtr = std::shared_ptr<const ErasesCert>;

// One rewrite step of the erasure judgment for a single variable.
struct ErasesCert {
    enum class Kind { Var, Gphase, Ctrl, Pair0, Pair1 };
    Kind kind;
    TypePtr type;     // the T' at this step
    int index = -1;   // Gphase/Ctrl: which list entry was rewritten
    ErasePtr inner;
};

// ---------------------------------------------------------------------------
// Typing derivations
// ---------------------------------------------------------------------------

enum class Rule {
    TUnit, TCvar, TQvar, TPurePair, TCtrl, TPureApp, TPurePerm,
    TMix, TMixedPerm, TMixedPair, TTry, TMixedApp,
    TGate, TLeft, TRight, TPureAbs, TRphase, TChannel, TMixedAbs,
};

enum class JudgmentKind { PureExpr, MixedExpr, Prog };

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
    Rule rule;
    JudgmentKind kind;

    // conclusion judgment
    Context classical; // PureExpr only
    Context quantum;   // PureExpr and MixedExpr
    ExprPtr expr;
    ProgPtr prog;
    TypePtr type;      // expression judgments
    ProgType prog_type;

    std::vector<DerivPtr> premises;

    // TPurePerm / TMixedPerm: conclusion context[i] = premise context[perm[i]]
    std::vector<int> perm_classical, perm_quantum;

    // TPurePair / TMixedPair: |shared|, |only-first|, |only-second|
    // TTry: n_first = |ctx of try body|, n_second = |ctx of catch body|
    int n_shared = 0, n_first = 0, n_second = 0;

    // TCtrl bookkeeping: |Γ| and |Δ| shared with the scrutinee; branch
    // pattern contexts; certificates. Premises are laid out as
    // [mixed scrutinee, pattern_1..pattern_n, body_1..body_n].
    int n_cls_shared = 0, n_qud_shared = 0;
    std::vector<Context> branch_ctx;
    OrthoPtr ortho;
    std::vector<ErasePtr> erases;

    // TMixedAbs: |Δ| kept by the body (prefix of the pattern context)
    int n_kept = 0;
};

inline const char *rule_name(Rule r) {
    switch (r) {
    case Rule::TUnit: return "T-Unit";
    case Rule::TCvar: return "T-Cvar";
    case Rule::TQvar: return "T-Qvar";
    case Rule::TPurePair: return "T-PurePair";
    case Rule::TCtrl: return "T-Ctrl";
    case Rule::TPureApp: return "T-PureApp";
    case Rule::TPurePerm: return "T-PurePerm";
    case Rule::TMix: return "T-Mix";
    case Rule::TMixedPerm: return "T-MixedPerm";
    case Rule::TMixedPair: return "T-MixedPair";
    case Rule::TTry: return "T-Try";
    case Rule::TMixedApp: return "T-MixedApp";
    case Rule::TGate: return "T-Gate";
    case Rule::TLeft: return "T-Left";
    case Rule::TRight: return "T-Right";
    case Rule::TPureAbs: return "T-PureAbs";
    case Rule::TRphase: return "T-Rphase";
    case Rule::TChannel: return "T-Channel";
    case Rule::TMixedAbs: return "T-MixedAbs";
    }
    return "?";
}

DerivPtr infer_pure_expr(const Context &classical, const Context &quantum, const ExprPtr &e);
DerivPtr infer_mixed_expr(const Context &quantum, const ExprPtr &e);
DerivPtr infer_prog(const ProgPtr &f);
DerivPtr infer_prog_channel(const ProgPtr &f);
Context pattern_context(const ExprPtr &pattern, const TypePtr &t);
OrthoPtr check_ortho(const TypePtr &t, const std::vector<ExprPtr> &patterns);
SpanPtr check_spanning(const TypePtr &t, const std::vector<ExprPtr> &patterns);
ErasePtr check_erases(const TypePtr &result_type, const std::string &var,
                      const std::vector<ExprPtr> &bodies);

// ---------------------------------------------------------------------------
// Spanning / orthogonality checking
// ---------------------------------------------------------------------------

namespace detail {

struct SpanBuild {
    SpanPtr cert;
    // For each cert pattern: the index in the original input list, or -1 for
    // completion patterns.
    std::vector<int> orig;
};

inline bool is_injection(const ExprPtr &e, bool &is_left) {
    if (e->kind != Expr::Kind::App)
        return false;
    if (e->prog->kind == Prog::Kind::Left) {
        is_left = true;
        return true;
    }
    if (e->prog->kind == Prog::Kind::Right) {
        is_left = false;
        return true;
    }
    return false;
}

inline SpanPtr mk_span(SpanningCert::Kind k, TypePtr t, std::vector<ExprPtr> pats) {
    auto c = std::make_shared<SpanningCert>();
    c->kind = k;
    c->type = std::move(t);
    c->patterns = std::move(pats);
    return c;
}

// Builds a spanning list containing the given (pattern, original index)
// entries as a subsequence, inserting completion patterns where needed.
// Throws TypeError when two patterns overlap or a pattern has an unsupported
// shape.
inline SpanBuild complete_spanning(const TypePtr &t,
                                   const std::vector<std::pair<ExprPtr, int>> &patterns,
                                   int &fresh) {
    SpanBuild out;
    // no patterns: Void has the empty spanning list, anything else is covered
    // by a single fresh variable
    if (patterns.empty()) {
        if (t->kind == DataType::Kind::Void) {
            out.cert = mk_span(SpanningCert::Kind::Void, t, {});
            return out;
        }
        ExprPtr v = var_expr("_q" + std::to_string(fresh++));
        out.cert = mk_span(SpanningCert::Kind::Var, t, {v});
        out.orig = {-1};
        return out;
    }
    // a variable pattern spans the whole type, so it can only stand alone
    for (const auto &[p, idx] : patterns) {
        if (p->kind == Expr::Kind::Var && patterns.size() > 1)
            throw TypeError("patterns are not orthogonal: variable pattern '" + p->var +
                            "' overlaps the other patterns");
    }
    if (patterns.size() == 1 && patterns[0].first->kind == Expr::Kind::Var) {
        out.cert = mk_span(SpanningCert::Kind::Var, t, {patterns[0].first});
        out.orig = {patterns[0].second};
        return out;
    }

    switch (t->kind) {
    case DataType::Kind::Void:
        throw TypeError("no pattern other than a variable can match Void");
    case DataType::Kind::Unit: {
        if (patterns.size() > 1)
            throw TypeError("patterns are not orthogonal: duplicate unit patterns");
        const auto &[p, idx] = patterns[0];
        if (p->kind != Expr::Kind::Unit)
            throw TypeError("pattern " + print_expr(p) + " cannot match type ()");
        out.cert = mk_span(SpanningCert::Kind::Unit, t, {p});
        out.orig = {idx};
        return out;
    }
    case DataType::Kind::Sum: {
        std::vector<std::pair<ExprPtr, int>> lefts, rights;
        for (const auto &[p, idx] : patterns) {
            bool is_left = false;
            if (!is_injection(p, is_left))
                throw TypeError("pattern " + print_expr(p) +
                                " is not an injection pattern for a sum type");
            if (!type_equal(p->prog->t0, t->left) || !type_equal(p->prog->t1, t->right))
                throw TypeError("injection pattern " + print_expr(p) +
                                " is annotated for a different sum type than " + print_type(t));
            (is_left ? lefts : rights).push_back({p->arg, idx});
        }
        SpanBuild lb = complete_spanning(t->left, lefts, fresh);
        SpanBuild rb = complete_spanning(t->right, rights, fresh);
        std::vector<ExprPtr> pats;
        for (const auto &p : lb.cert->patterns)
            pats.push_back(app_expr(left_prog(t->left, t->right), p));
        for (const auto &p : rb.cert->patterns)
            pats.push_back(app_expr(right_prog(t->left, t->right), p));
        auto cert = std::make_shared<SpanningCert>();
        cert->kind = SpanningCert::Kind::Sum;
        cert->type = t;
        cert->patterns = pats;
        cert->left = lb.cert;
        cert->right = rb.cert;
        out.cert = cert;
        out.orig = lb.orig;
        out.orig.insert(out.orig.end(), rb.orig.begin(), rb.orig.end());
        return out;
    }
    case DataType::Kind::Prod: {
        // group by syntactically equal first components, in appearance order
        std::vector<ExprPtr> firsts;
        std::vector<std::vector<std::pair<ExprPtr, int>>> seconds;
        for (const auto &[p, idx] : patterns) {
            if (p->kind != Expr::Kind::Pair)
                throw TypeError("pattern " + print_expr(p) +
                                " is not a pair pattern for a product type");
            std::size_t g = 0;
            for (; g < firsts.size(); ++g)
                if (expr_equal(firsts[g], p->first))
                    break;
            if (g == firsts.size()) {
                firsts.push_back(p->first);
                seconds.emplace_back();
            }
            seconds[g].push_back({p->second, idx});
        }
        // the pair rule requires pattern variables to be disjoint between the
        // two components of each group
        for (std::size_t g = 0; g < firsts.size(); ++g) {
            auto fv_first = free_vars(firsts[g]);
            for (const auto &[s, idx] : seconds[g]) {
                for (const auto &v : free_vars(s))
                    if (fv_first.count(v))
                        throw TypeError("pair pattern shares variable '" + v +
                                        "' between its components");
            }
        }
        std::vector<std::pair<ExprPtr, int>> first_entries;
        for (std::size_t g = 0; g < firsts.size(); ++g)
            first_entries.push_back({firsts[g], static_cast<int>(g)});
        SpanBuild fb = complete_spanning(t->left, first_entries, fresh);
        auto cert = std::make_shared<SpanningCert>();
        cert->kind = SpanningCert::Kind::Pair;
        cert->type = t;
        cert->base = fb.cert;
        for (std::size_t bi = 0; bi < fb.cert->patterns.size(); ++bi) {
            int g = fb.orig[bi];
            std::vector<std::pair<ExprPtr, int>> secs;
            if (g >= 0)
                secs = seconds[static_cast<std::size_t>(g)];
            SpanBuild sb = complete_spanning(t->right, secs, fresh);
            cert->groups.push_back(sb.cert);
            for (std::size_t k = 0; k < sb.cert->patterns.size(); ++k) {
                cert->patterns.push_back(
                    pair_expr(fb.cert->patterns[bi], sb.cert->patterns[k]));
                out.orig.push_back(sb.orig[k]);
            }
        }
        out.cert = cert;
        return out;
    }
    }
    throw InternalError("unhandled type kind in spanning check");
}

inline SpanPtr wrap_span_perm(const SpanPtr &inner, const std::vector<int> &perm) {
    bool identity = true;
    for (std::size_t i = 0; i < perm.size(); ++i)
        if (perm[i] != static_cast<int>(i))
            identity = false;
    if (identity)
        return inner;
    auto c = std::make_shared<SpanningCert>();
    c->kind = SpanningCert::Kind::Perm;
    c->type = inner->type;
    c->perm = perm;
    c->inner = inner;
    for (int p : perm)
        c->patterns.push_back(inner->patterns[static_cast<std::size_t>(p)]);
    return c;
}

} // namespace detail

inline OrthoPtr check_ortho(const TypePtr &t, const std::vector<ExprPtr> &patterns) {
    int fresh = 0;
    std::vector<std::pair<ExprPtr, int>> entries;
    for (std::size_t i = 0; i < patterns.size(); ++i)
        entries.push_back({patterns[i], static_cast<int>(i)});
    detail::SpanBuild build = detail::complete_spanning(t, entries, fresh);

    // reorder the spanning list so the kept patterns come first, in input order
    std::vector<int> perm(build.cert->patterns.size(), -1);
    std::size_t pos = 0;
    for (std::size_t want = 0; want < patterns.size(); ++want) {
        for (std::size_t k = 0; k < build.orig.size(); ++k)
            if (build.orig[k] == static_cast<int>(want))
                perm[pos++] = static_cast<int>(k);
    }
    auto cert = std::make_shared<OrthoCert>();
    cert->type = t;
    cert->kept = patterns;
    for (std::size_t k = 0; k < build.orig.size(); ++k)
        if (build.orig[k] < 0) {
            perm[pos++] = static_cast<int>(k);
            cert->dropped.push_back(build.cert->patterns[k]);
        }
    if (pos != perm.size())
        throw InternalError("ortho completion lost a pattern");
    cert->spanning = detail::wrap_span_perm(build.cert, perm);
    for (const auto &p : cert->kept)
        cert->kept_ctx.push_back(pattern_context(p, t));
    for (const auto &p : cert->dropped)
        cert->dropped_ctx.push_back(pattern_context(p, t));
    return cert;
}

inline SpanPtr check_spanning(const TypePtr &t, const std::vector<ExprPtr> &patterns) {
    int fresh = 0;
    std::vector<std::pair<ExprPtr, int>> entries;
    for (std::size_t i = 0; i < patterns.size(); ++i)
        entries.push_back({patterns[i], static_cast<int>(i)});
    detail::SpanBuild build = detail::complete_spanning(t, entries, fresh);
    for (std::size_t k = 0; k < build.orig.size(); ++k)
        if (build.orig[k] < 0)
            throw TypeError("patterns do not span " + print_type(t) + ": " +
                            print_expr(build.cert->patterns[k]) + " is uncovered");
    std::vector<int> perm(build.orig.size());
    for (std::size_t k = 0; k < build.orig.size(); ++k)
        perm[static_cast<std::size_t>(build.orig[k])] = static_cast<int>(k);
    return detail::wrap_span_perm(build.cert, perm);
}

// ---------------------------------------------------------------------------
// Erasure checking
// ---------------------------------------------------------------------------

namespace detail {

// e_j |> gphase[T, r]  ==  App(Rphase(T, y, r, r), e_j)
inline bool is_gphase_app(const ExprPtr &e, const TypePtr &result_type) {
    return e->kind == Expr::Kind::App && e->prog->kind == Prog::Kind::Rphase &&
           e->prog->pattern->kind == Expr::Kind::Var &&
           real_equal(e->prog->r_match, e->prog->r_ortho) &&
           type_equal(e->prog->domain, result_type);
}

} // namespace detail

inline ErasePtr check_erases(const TypePtr &result_type, const std::string &var,
                             const std::vector<ExprPtr> &bodies) {
    auto mk = [&](ErasesCert::Kind k, int index, ErasePtr inner) {
        auto c = std::make_shared<ErasesCert>();
        c->kind = k;
        c->type = result_type;
        c->index = index;
        c->inner = std::move(inner);
        return c;
    };

    // strip a global-phase wrapper
    for (std::size_t j = 0; j < bodies.size(); ++j) {
        if (detail::is_gphase_app(bodies[j], result_type)) {
            auto rewritten = bodies;
            rewritten[j] = bodies[j]->arg;
            return mk(ErasesCert::Kind::Gphase, static_cast<int>(j),
                      check_erases(result_type, var, rewritten));
        }
    }
    // all entries are the variable itself (vacuously true of the empty list)
    bool all_var = true;
    for (const auto &b : bodies)
        if (b->kind != Expr::Kind::Var || b->var != var)
            all_var = false;
    if (all_var)
        return mk(ErasesCert::Kind::Var, -1, nullptr);
    // inline a ctrl expression's branch bodies
    for (std::size_t j = 0; j < bodies.size(); ++j) {
        if (bodies[j]->kind == Expr::Kind::Ctrl &&
            type_equal(bodies[j]->result_type, result_type)) {
            std::vector<ExprPtr> rewritten;
            for (std::size_t k = 0; k < j; ++k)
                rewritten.push_back(bodies[k]);
            for (const auto &br : bodies[j]->branches)
                rewritten.push_back(br.body);
            for (std::size_t k = j + 1; k < bodies.size(); ++k)
                rewritten.push_back(bodies[k]);
            return mk(ErasesCert::Kind::Ctrl, static_cast<int>(j),
                      check_erases(result_type, var, rewritten));
        }
    }
    // descend into a common pair component
    if (result_type->kind == DataType::Kind::Prod) {
        bool all_pairs = true;
        for (const auto &b : bodies)
            if (b->kind != Expr::Kind::Pair)
                all_pairs = false;
        if (all_pairs) {
            std::vector<ExprPtr> firsts, seconds;
            for (const auto &b : bodies) {
                firsts.push_back(b->first);
                seconds.push_back(b->second);
            }
            try {
                return mk(ErasesCert::Kind::Pair0, -1,
                          check_erases(result_type->left, var, firsts));
            } catch (const TypeError &) {
            }
            try {
                return mk(ErasesCert::Kind::Pair1, -1,
                          check_erases(result_type->right, var, seconds));
            } catch (const TypeError &) {
            }
        }
    }
    throw TypeError("ctrl branches cannot erase variable '" + var + "'" +
                    (bodies.empty() ? "" : ": offending body " + print_expr(bodies[0])));
}

// ---------------------------------------------------------------------------
// Pattern contexts
// ---------------------------------------------------------------------------

namespace detail {

inline void pattern_context_into(const ExprPtr &pattern, const TypePtr &t, Context &out) {
    switch (pattern->kind) {
    case Expr::Kind::Unit:
        if (t->kind != DataType::Kind::Unit)
            throw TypeError("pattern () cannot have type " + print_type(t));
        return;
    case Expr::Kind::Var: {
        int i = context_find(out, pattern->var);
        if (i >= 0) {
            if (!type_equal(out[static_cast<std::size_t>(i)].type, t))
                throw TypeError("variable '" + pattern->var +
                                "' is used at two different types in one pattern");
            return;
        }
        out.push_back(Binding{pattern->var, t});
        return;
    }
    case Expr::Kind::Pair:
        if (t->kind != DataType::Kind::Prod)
            throw TypeError("pair pattern cannot have non-product type " + print_type(t));
        pattern_context_into(pattern->first, t->left, out);
        pattern_context_into(pattern->second, t->right, out);
        return;
    case Expr::Kind::App: {
        DerivPtr df = infer_prog(pattern->prog);
        if (!df->prog_type.coherent)
            throw TypeError("pattern applies a quantum channel, which has no pure typing");
        if (!type_equal(df->prog_type.codomain, t))
            throw TypeError("pattern " + print_expr(pattern) + " has type " +
                            print_type(df->prog_type.codomain) + ", expected " + print_type(t));
        pattern_context_into(pattern->arg, df->prog_type.domain, out);
        return;
    }
    case Expr::Kind::Ctrl: {
        if (!type_equal(pattern->result_type, t))
            throw TypeError("ctrl pattern is annotated " + print_type(pattern->result_type) +
                            ", expected " + print_type(t));
        pattern_context_into(pattern->scrutinee, pattern->scrutinee_type, out);
        for (const auto &br : pattern->branches) {
            Context branch_vars = pattern_context(br.pattern, pattern->scrutinee_type);
            Context body_ctx;
            pattern_context_into(br.body, t, body_ctx);
            for (const auto &b : body_ctx) {
                if (context_find(branch_vars, b.name) >= 0)
                    continue; // bound by the branch pattern
                int i = context_find(out, b.name);
                if (i >= 0) {
                    if (!type_equal(out[static_cast<std::size_t>(i)].type, b.type))
                        throw TypeError("variable '" + b.name +
                                        "' is used at two different types in one pattern");
                } else {
                    out.push_back(b);
                }
            }
        }
        return;
    }
    case Expr::Kind::TryCatch:
        throw TypeError("try/catch cannot appear in a pattern (it has no pure typing)");
    }
    throw InternalError("unhandled pattern kind");
}

} // namespace detail

inline Context pattern_context(const ExprPtr &pattern, const TypePtr &t) {
    Context out;
    detail::pattern_context_into(pattern, t, out);
    return out;
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

namespace detail {

inline std::shared_ptr<Derivation> mk_deriv(Rule r, JudgmentKind k) {
    auto d = std::make_shared<Derivation>();
    d->rule = r;
    d->kind = k;
    return d;
}

// Splits a context by membership in the free-variable sets of two subterms.
struct CtxSplit {
    Context shared, only0, only1;
};

inline CtxSplit split_by_fv(const Context &ctx, const std::set<std::string> &fv0,
                            const std::set<std::string> &fv1, const char *what) {
    CtxSplit s;
    for (const auto &b : ctx) {
        bool in0 = fv0.count(b.name) > 0;
        bool in1 = fv1.count(b.name) > 0;
        if (in0 && in1)
            s.shared.push_back(b);
        else if (in0)
            s.only0.push_back(b);
        else if (in1)
            s.only1.push_back(b);
        else
            throw TypeError(std::string("relevance violation: quantum variable '") + b.name +
                            "' is not used by " + what);
    }
    return s;
}

inline Context concat(const Context &a, const Context &b) {
    Context out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline Context concat(const Context &a, const Context &b, const Context &c) {
    return concat(concat(a, b), c);
}

// Wraps `inner` in an explicit exchange node so its conclusion contexts match
// the requested ones (which must be permutations of the inner contexts).
inline DerivPtr wrap_perm_pure(const Context &classical, const Context &quantum,
                               const DerivPtr &inner) {
    if (context_equal(inner->classical, classical) && context_equal(inner->quantum, quantum))
        return inner;
    auto d = mk_deriv(Rule::TPurePerm, JudgmentKind::PureExpr);
    d->classical = classical;
    d->quantum = quantum;
    d->expr = inner->expr;
    d->type = inner->type;
    d->premises = {inner};
    for (const auto &b : classical) {
        int i = context_find(inner->classical, b.name);
        if (i < 0)
            throw InternalError("permutation wrapper: classical contexts do not match");
        d->perm_classical.push_back(i);
    }
    for (const auto &b : quantum) {
        int i = context_find(inner->quantum, b.name);
        if (i < 0)
            throw InternalError("permutation wrapper: quantum contexts do not match");
        d->perm_quantum.push_back(i);
    }
    return d;
}

inline DerivPtr wrap_perm_mixed(const Context &quantum, const DerivPtr &inner) {
    if (context_equal(inner->quantum, quantum))
        return inner;
    auto d = mk_deriv(Rule::TMixedPerm, JudgmentKind::MixedExpr);
    d->quantum = quantum;
    d->expr = inner->expr;
    d->type = inner->type;
    d->premises = {inner};
    for (const auto &b : quantum) {
        int i = context_find(inner->quantum, b.name);
        if (i < 0)
            throw InternalError("permutation wrapper: contexts do not match");
        d->perm_quantum.push_back(i);
    }
    return d;
}

inline void check_wellformed(const Context &classical, const Context &quantum) {
    if (!context_wellformed(classical) || !context_wellformed(quantum))
        throw TypeError("context is not well-formed (duplicate variable)");
    for (const auto &b : quantum)
        if (context_find(classical, b.name) >= 0)
            throw TypeError("variable '" + b.name +
                            "' appears in both the classical and quantum context");
}

} // namespace detail

inline DerivPtr infer_pure_expr(const Context &classical, const Context &quantum,
                                const ExprPtr &e) {
    using namespace detail;
    check_wellformed(classical, quantum);

    switch (e->kind) {
    case Expr::Kind::Unit: {
        if (!quantum.empty())
            throw TypeError("relevance violation: quantum variable '" + quantum[0].name +
                            "' is not used by ()");
        auto d = mk_deriv(Rule::TUnit, JudgmentKind::PureExpr);
        d->classical = classical;
        d->expr = e;
        d->type = unit_type();
        return d;
    }
    case Expr::Kind::Var: {
        if (quantum.size() == 1 && quantum[0].name == e->var) {
            auto d = mk_deriv(Rule::TQvar, JudgmentKind::PureExpr);
            d->classical = classical;
            d->quantum = quantum;
            d->expr = e;
            d->type = quantum[0].type;
            return d;
        }
        if (quantum.empty()) {
            int i = context_find(classical, e->var);
            if (i < 0)
                throw TypeError("unbound variable '" + e->var + "'");
            auto d = mk_deriv(Rule::TCvar, JudgmentKind::PureExpr);
            d->classical = classical;
            d->expr = e;
            d->type = classical[static_cast<std::size_t>(i)].type;
            return d;
        }
        for (const auto &b : quantum)
            if (b.name != e->var)
                throw TypeError("relevance violation: quantum variable '" + b.name +
                                "' is not used by " + print_expr(e));
        throw TypeError("unbound variable '" + e->var + "'");
    }
    case Expr::Kind::Pair: {
        auto fv0 = free_vars(e->first);
        auto fv1 = free_vars(e->second);
        CtxSplit s = split_by_fv(quantum, fv0, fv1, "either pair component");
        DerivPtr d0 = infer_pure_expr(classical, concat(s.shared, s.only0), e->first);
        DerivPtr d1 = infer_pure_expr(classical, concat(s.shared, s.only1), e->second);
        auto d = mk_deriv(Rule::TPurePair, JudgmentKind::PureExpr);
        d->classical = classical;
        d->quantum = concat(s.shared, s.only0, s.only1);
        d->expr = e;
        d->type = prod_type(d0->type, d1->type);
        d->premises = {d0, d1};
        d->n_shared = static_cast<int>(s.shared.size());
        d->n_first = static_cast<int>(s.only0.size());
        d->n_second = static_cast<int>(s.only1.size());
        return wrap_perm_pure(classical, quantum, d);
    }
    case Expr::Kind::App: {
        DerivPtr df = infer_prog(e->prog);
        if (!df->prog_type.coherent)
            throw TypeError("a quantum channel cannot be applied inside a pure expression");
        DerivPtr de = infer_pure_expr(classical, quantum, e->arg);
        if (!type_equal(de->type, df->prog_type.domain))
            throw TypeError("program expects " + print_type(df->prog_type.domain) +
                            " but its argument has type " + print_type(de->type));
        auto d = mk_deriv(Rule::TPureApp, JudgmentKind::PureExpr);
        d->classical = classical;
        d->quantum = quantum;
        d->expr = e;
        d->type = df->prog_type.codomain;
        d->premises = {df, de};
        return d;
    }
    case Expr::Kind::TryCatch:
        throw TypeError("try/catch has no pure typing (rule T-Try is mixed only)");
    case Expr::Kind::Ctrl: {
        auto fv_s = free_vars(e->scrutinee);
        Context cls_shared, cls_rest, qud_shared, qud_rest;
        for (const auto &b : classical)
            (fv_s.count(b.name) ? cls_shared : cls_rest).push_back(b);
        for (const auto &b : quantum)
            (fv_s.count(b.name) ? qud_shared : qud_rest).push_back(b);
        if (e->branches.empty() && !qud_rest.empty())
            throw TypeError("relevance violation: quantum variable '" + qud_rest[0].name +
                            "' is not used by a branchless ctrl expression");

        DerivPtr d_scrut = infer_mixed_expr(detail::concat(cls_shared, qud_shared), e->scrutinee);
        if (!type_equal(d_scrut->type, e->scrutinee_type))
            throw TypeError("ctrl scrutinee is annotated " + print_type(e->scrutinee_type) +
                            " but has type " + print_type(d_scrut->type));

        std::vector<ExprPtr> patterns, bodies;
        for (const auto &br : e->branches) {
            patterns.push_back(br.pattern);
            bodies.push_back(br.body);
        }
        std::vector<Context> branch_ctx;
        std::vector<DerivPtr> pattern_derivs;
        for (const auto &p : patterns) {
            Context g = pattern_context(p, e->scrutinee_type);
            for (const auto &b : g)
                if (context_find(classical, b.name) >= 0 || context_find(quantum, b.name) >= 0)
                    throw TypeError("branch pattern variable '" + b.name +
                                    "' shadows a variable already in scope");
            DerivPtr dp = infer_pure_expr(Context{}, g, p);
            if (!type_equal(dp->type, e->scrutinee_type))
                throw TypeError("branch pattern " + print_expr(p) + " has type " +
                                print_type(dp->type) + ", expected " +
                                print_type(e->scrutinee_type));
            branch_ctx.push_back(g);
            pattern_derivs.push_back(dp);
        }
        OrthoPtr ortho = check_ortho(e->scrutinee_type, patterns);
        std::vector<ErasePtr> erases;
        for (const auto &b : qud_shared)
            erases.push_back(check_erases(e->result_type, b.name, bodies));

        Context body_cls_base = detail::concat(cls_shared, cls_rest);
        Context body_qud = detail::concat(qud_shared, qud_rest);
        std::vector<DerivPtr> body_derivs;
        for (std::size_t j = 0; j < e->branches.size(); ++j) {
            DerivPtr db = infer_pure_expr(detail::concat(body_cls_base, branch_ctx[j]),
                                          body_qud, e->branches[j].body);
            if (!type_equal(db->type, e->result_type))
                throw TypeError("ctrl branch body " + print_expr(e->branches[j].body) +
                                " has type " + print_type(db->type) + ", expected " +
                                print_type(e->result_type));
            body_derivs.push_back(db);
        }

        auto d = mk_deriv(Rule::TCtrl, JudgmentKind::PureExpr);
        d->classical = body_cls_base;
        d->quantum = body_qud;
        d->expr = e;
        d->type = e->result_type;
        d->premises.push_back(d_scrut);
        for (auto &p : pattern_derivs)
            d->premises.push_back(p);
        for (auto &b : body_derivs)
            d->premises.push_back(b);
        d->n_cls_shared = static_cast<int>(cls_shared.size());
        d->n_qud_shared = static_cast<int>(qud_shared.size());
        d->branch_ctx = branch_ctx;
        d->ortho = ortho;
        d->erases = erases;
        return wrap_perm_pure(classical, quantum, d);
    }
    }
    throw InternalError("unhandled expression kind");
}

inline DerivPtr infer_mixed_expr(const Context &quantum, const ExprPtr &e) {
    using namespace detail;
    if (!context_wellformed(quantum))
        throw TypeError("context is not well-formed (duplicate variable)");

    // Prefer the pure-rooted derivation whenever the pure judgment holds.
    try {
        DerivPtr dp = infer_pure_expr(Context{}, quantum, e);
        auto d = mk_deriv(Rule::TMix, JudgmentKind::MixedExpr);
        d->quantum = quantum;
        d->expr = e;
        d->type = dp->type;
        d->premises = {dp};
        return d;
    } catch (const TypeError &pure_error) {
        switch (e->kind) {
        case Expr::Kind::Pair: {
            auto fv0 = free_vars(e->first);
            auto fv1 = free_vars(e->second);
            CtxSplit s = split_by_fv(quantum, fv0, fv1, "either pair component");
            DerivPtr d0 = infer_mixed_expr(concat(s.shared, s.only0), e->first);
            DerivPtr d1 = infer_mixed_expr(concat(s.shared, s.only1), e->second);
            auto d = mk_deriv(Rule::TMixedPair, JudgmentKind::MixedExpr);
            d->quantum = concat(s.shared, s.only0, s.only1);
            d->expr = e;
            d->type = prod_type(d0->type, d1->type);
            d->premises = {d0, d1};
            d->n_shared = static_cast<int>(s.shared.size());
            d->n_first = static_cast<int>(s.only0.size());
            d->n_second = static_cast<int>(s.only1.size());
            return wrap_perm_mixed(quantum, d);
        }
        case Expr::Kind::TryCatch: {
            auto fv0 = free_vars(e->first);
            auto fv1 = free_vars(e->second);
            Context ctx0, ctx1;
            for (const auto &b : quantum) {
                bool in0 = fv0.count(b.name) > 0;
                bool in1 = fv1.count(b.name) > 0;
                if (in0 && in1)
                    throw TypeError("variable '" + b.name +
                                    "' is needed by both the try and catch bodies, but rule "
                                    "T-Try splits the context between them");
                if (in0)
                    ctx0.push_back(b);
                else if (in1)
                    ctx1.push_back(b);
                else
                    throw TypeError("relevance violation: quantum variable '" + b.name +
                                    "' is not used by either try/catch body");
            }
            DerivPtr d0 = infer_mixed_expr(ctx0, e->first);
            DerivPtr d1 = infer_mixed_expr(ctx1, e->second);
            if (!type_equal(d0->type, d1->type))
                throw TypeError("try body has type " + print_type(d0->type) +
                                " but catch body has type " + print_type(d1->type));
            auto d = mk_deriv(Rule::TTry, JudgmentKind::MixedExpr);
            d->quantum = concat(ctx0, ctx1);
            d->expr = e;
            d->type = d0->type;
            d->premises = {d0, d1};
            d->n_first = static_cast<int>(ctx0.size());
            d->n_second = static_cast<int>(ctx1.size());
            return wrap_perm_mixed(quantum, d);
        }
        case Expr::Kind::App: {
            DerivPtr df = infer_prog_channel(e->prog);
            DerivPtr de = infer_mixed_expr(quantum, e->arg);
            if (!type_equal(de->type, df->prog_type.domain))
                throw TypeError("program expects " + print_type(df->prog_type.domain) +
                                " but its argument has type " + print_type(de->type));
            auto d = mk_deriv(Rule::TMixedApp, JudgmentKind::MixedExpr);
            d->quantum = quantum;
            d->expr = e;
            d->type = df->prog_type.codomain;
            d->premises = {df, de};
            return d;
        }
        default:
            throw;
        }
    }
}

inline DerivPtr infer_prog(const ProgPtr &f) {
    using namespace detail;
    switch (f->kind) {
    case Prog::Kind::U3: {
        auto d = mk_deriv(Rule::TGate, JudgmentKind::Prog);
        d->prog = f;
        d->prog_type = ProgType{true, bit_type(), bit_type()};
        return d;
    }
    case Prog::Kind::Left: {
        auto d = mk_deriv(Rule::TLeft, JudgmentKind::Prog);
        d->prog = f;
        d->prog_type = ProgType{true, f->t0, sum_type(f->t0, f->t1)};
        return d;
    }
    case Prog::Kind::Right: {
        auto d = mk_deriv(Rule::TRight, JudgmentKind::Prog);
        d->prog = f;
        d->prog_type = ProgType{true, f->t1, sum_type(f->t0, f->t1)};
        return d;
    }
    case Prog::Kind::Rphase: {
        Context ctx = pattern_context(f->pattern, f->domain);
        DerivPtr dp = infer_pure_expr(Context{}, ctx, f->pattern);
        if (!type_equal(dp->type, f->domain))
            throw TypeError("rphase pattern has type " + print_type(dp->type) +
                            ", expected " + print_type(f->domain));
        auto d = mk_deriv(Rule::TRphase, JudgmentKind::Prog);
        d->prog = f;
        d->prog_type = ProgType{true, f->domain, f->domain};
        d->premises = {dp};
        return d;
    }
    case Prog::Kind::Abs: {
        Context full = pattern_context(f->pattern, f->domain);
        DerivPtr d_pat = infer_pure_expr(Context{}, full, f->pattern);
        if (!type_equal(d_pat->type, f->domain))
            throw TypeError("abstraction pattern has type " + print_type(d_pat->type) +
                            ", expected " + print_type(f->domain));
        // coherent first: every pattern variable must be used purely by the body
        try {
            DerivPtr d_body = infer_pure_expr(Context{}, full, f->body);
            auto d = mk_deriv(Rule::TPureAbs, JudgmentKind::Prog);
            d->prog = f;
            d->prog_type = ProgType{true, f->domain, d_body->type};
            d->premises = {d_pat, d_body};
            return d;
        } catch (const TypeError &) {
        }
        auto fv_body = free_vars(f->body);
        Context kept, discarded;
        for (const auto &b : full)
            (fv_body.count(b.name) ? kept : discarded).push_back(b);
        DerivPtr d_pat2 = wrap_perm_pure(Context{}, concat(kept, discarded), d_pat);
        DerivPtr d_body = infer_mixed_expr(kept, f->body);
        auto d = mk_deriv(Rule::TMixedAbs, JudgmentKind::Prog);
        d->prog = f;
        d->prog_type = ProgType{false, f->domain, d_body->type};
        d->premises = {d_pat2, d_body};
        d->n_kept = static_cast<int>(kept.size());
        return d;
    }
    }
    throw InternalError("unhandled program kind");
}

inline DerivPtr infer_prog_channel(const ProgPtr &f) {
    DerivPtr d = infer_prog(f);
    if (!d->prog_type.coherent)
        return d;
    auto c = detail::mk_deriv(Rule::TChannel, JudgmentKind::Prog);
    c->prog = f;
    c->prog_type = ProgType{false, d->prog_type.domain, d->prog_type.codomain};
    c->premises = {d};
    return c;
}

// ---------------------------------------------------------------------------
// Derivation printing
// ---------------------------------------------------------------------------

inline std::string print_judgment(const DerivPtr &d) {
    switch (d->kind) {
    case JudgmentKind::PureExpr:
        return print_context(d->classical) + " ; " + print_context(d->quantum) + " |- " +
               print_expr(d->expr) + " : " + print_type(d->type);
    case JudgmentKind::MixedExpr:
        return print_context(d->quantum) + " ||- " + print_expr(d->expr) + " : " +
               print_type(d->type);
    case JudgmentKind::Prog:
        return "|- " + print_prog(d->prog) + " : " + print_prog_type(d->prog_type);
    }
    return "?";
}

inline void print_derivation(const DerivPtr &d, std::string &out, int indent = 0) {
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out += std::string("[") + rule_name(d->rule) + "] " + print_judgment(d) + "\n";
    for (const auto &p : d->premises)
        print_derivation(p, out, indent + 1);
}

inline std::string print_derivation(const DerivPtr &d) {
    std::string out;
    print_derivation(d, out, 0);
    return out;
}

} // namespace qunity
