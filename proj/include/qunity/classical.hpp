#pragma once

#include <optional>

#include "qunity/typecheck.hpp"

namespace qunity {

// Interpreter for the classical sublanguage (u3 and rphase removed): pure
// judgments evaluate to injective partial functions over values, mixed
// judgments to arbitrary partial functions. Partiality is a result, never an
// interpreter error.

using PartialResult = std::optional<ValuePtr>; // nullopt models the undefined symbol

bool is_classical(const ExprPtr &e);
bool is_classical(const ProgPtr &f);

inline bool is_classical(const ProgPtr &f) {
    switch (f->kind) {
    case Prog::Kind::U3:
    case Prog::Kind::Rphase:
        return false;
    case Prog::Kind::Left:
    case Prog::Kind::Right:
        return true;
    case Prog::Kind::Abs:
        return is_classical(f->pattern) && is_classical(f->body);
    }
    return false;
}

inline bool is_classical(const ExprPtr &e) {
    switch (e->kind) {
    case Expr::Kind::Unit:
    case Expr::Kind::Var:
        return true;
    case Expr::Kind::Pair:
    case Expr::Kind::TryCatch:
        return is_classical(e->first) && is_classical(e->second);
    case Expr::Kind::Ctrl: {
        if (!is_classical(e->scrutinee))
            return false;
        for (const auto &br : e->branches)
            if (!is_classical(br.pattern) || !is_classical(br.body))
                return false;
        return true;
    }
    case Expr::Kind::App:
        return is_classical(e->prog) && is_classical(e->arg);
    }
    return false;
}

PartialResult classical_pure_eval(const DerivPtr &d, const Valuation &sigma,
                                  const Valuation &tau);
PartialResult classical_mixed_eval(const DerivPtr &d, const Valuation &tau);
PartialResult classical_pure_prog_eval(const DerivPtr &d, const ValuePtr &v);
PartialResult classical_mixed_prog_eval(const DerivPtr &d, const ValuePtr &v);

namespace detail {

inline Valuation val_slice(const Valuation &v, int from, int count) {
    return Valuation(v.begin() + from, v.begin() + from + count);
}

} // namespace detail

inline PartialResult classical_pure_eval(const DerivPtr &d, const Valuation &sigma,
                                         const Valuation &tau) {
    switch (d->rule) {
    case Rule::TUnit:
        return unit_value();
    case Rule::TCvar:
        return valuation_lookup(sigma, d->expr->var);
    case Rule::TQvar:
        return tau[0].value;
    case Rule::TPurePair: {
        Valuation shared = detail::val_slice(tau, 0, d->n_shared);
        Valuation t0 = detail::val_slice(tau, d->n_shared, d->n_first);
        Valuation t1 = detail::val_slice(tau, d->n_shared + d->n_first, d->n_second);
        PartialResult a =
            classical_pure_eval(d->premises[0], sigma, concat_valuation(shared, t0));
        if (!a)
            return std::nullopt;
        PartialResult b =
            classical_pure_eval(d->premises[1], sigma, concat_valuation(shared, t1));
        if (!b)
            return std::nullopt;
        return pair_value(*a, *b);
    }
    case Rule::TPureApp: {
        PartialResult a = classical_pure_eval(d->premises[1], sigma, tau);
        if (!a)
            return std::nullopt;
        return classical_pure_prog_eval(d->premises[0], *a);
    }
    case Rule::TPurePerm:
        return classical_pure_eval(d->premises[0],
                                   unpermute_valuation(sigma, d->perm_classical),
                                   unpermute_valuation(tau, d->perm_quantum));
    case Rule::TCtrl: {
        std::size_t n = d->branch_ctx.size();
        Valuation sigma_shared(sigma.begin(), sigma.begin() + d->n_cls_shared);
        Valuation tau_shared(tau.begin(), tau.begin() + d->n_qud_shared);
        PartialResult scrut = classical_mixed_eval(
            d->premises[0], concat_valuation(sigma_shared, tau_shared));
        if (!scrut)
            return std::nullopt;
        // the orthogonality certificate guarantees at most one branch and
        // branch valuation can produce the scrutinee's value
        for (std::size_t j = 0; j < n; ++j) {
            std::uint64_t gdim = context_dimension(d->branch_ctx[j]);
            for (std::uint64_t ig = 0; ig < gdim; ++ig) {
                Valuation sj = valuation_at(d->branch_ctx[j], ig);
                PartialResult pat = classical_pure_eval(d->premises[1 + j], Valuation{}, sj);
                if (pat && value_equal(*pat, *scrut))
                    return classical_pure_eval(d->premises[1 + n + j],
                                               concat_valuation(sigma, sj), tau);
            }
        }
        return std::nullopt;
    }
    default:
        throw InternalError("not a pure expression rule in classical evaluation");
    }
}

inline PartialResult classical_mixed_eval(const DerivPtr &d, const Valuation &tau) {
    switch (d->rule) {
    case Rule::TMix:
        return classical_pure_eval(d->premises[0], Valuation{}, tau);
    case Rule::TMixedPerm:
        return classical_mixed_eval(d->premises[0],
                                    unpermute_valuation(tau, d->perm_quantum));
    case Rule::TMixedPair: {
        Valuation shared = detail::val_slice(tau, 0, d->n_shared);
        Valuation t0 = detail::val_slice(tau, d->n_shared, d->n_first);
        Valuation t1 = detail::val_slice(tau, d->n_shared + d->n_first, d->n_second);
        PartialResult a = classical_mixed_eval(d->premises[0], concat_valuation(shared, t0));
        if (!a)
            return std::nullopt;
        PartialResult b = classical_mixed_eval(d->premises[1], concat_valuation(shared, t1));
        if (!b)
            return std::nullopt;
        return pair_value(*a, *b);
    }
    case Rule::TTry: {
        Valuation t0 = detail::val_slice(tau, 0, d->n_first);
        Valuation t1 = detail::val_slice(tau, d->n_first, d->n_second);
        PartialResult a = classical_mixed_eval(d->premises[0], t0);
        if (a)
            return a;
        return classical_mixed_eval(d->premises[1], t1);
    }
    case Rule::TMixedApp: {
        PartialResult a = classical_mixed_eval(d->premises[1], tau);
        if (!a)
            return std::nullopt;
        return classical_mixed_prog_eval(d->premises[0], *a);
    }
    default:
        throw InternalError("not a mixed expression rule in classical evaluation");
    }
}

inline PartialResult classical_pure_prog_eval(const DerivPtr &d, const ValuePtr &v) {
    switch (d->rule) {
    case Rule::TLeft:
        return left_value(v, d->prog_type.codomain);
    case Rule::TRight:
        return right_value(v, d->prog_type.codomain);
    case Rule::TPureAbs: {
        // find the unique valuation mapped to v by the (injective) pattern
        const DerivPtr &d_pat = d->premises[0];
        std::uint64_t dim = context_dimension(d_pat->quantum);
        for (std::uint64_t i = 0; i < dim; ++i) {
            Valuation tau = valuation_at(d_pat->quantum, i);
            PartialResult pat = classical_pure_eval(d_pat, Valuation{}, tau);
            if (pat && value_equal(*pat, v))
                return classical_pure_eval(d->premises[1], Valuation{}, tau);
        }
        return std::nullopt;
    }
    default:
        throw InternalError("program is not classical (u3/rphase) or not pure");
    }
}

inline PartialResult classical_mixed_prog_eval(const DerivPtr &d, const ValuePtr &v) {
    switch (d->rule) {
    case Rule::TChannel:
        return classical_pure_prog_eval(d->premises[0], v);
    case Rule::TMixedAbs: {
        const DerivPtr &d_pat = d->premises[0];
        std::uint64_t dim = context_dimension(d_pat->quantum);
        for (std::uint64_t i = 0; i < dim; ++i) {
            Valuation tau = valuation_at(d_pat->quantum, i);
            PartialResult pat = classical_pure_eval(d_pat, Valuation{}, tau);
            if (pat && value_equal(*pat, v))
                return classical_mixed_eval(d->premises[1],
                                            detail::val_slice(tau, 0, d->n_kept));
        }
        return std::nullopt;
    }
    default:
        return classical_pure_prog_eval(d, v);
    }
}

} // namespace qunity
