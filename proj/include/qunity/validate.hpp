#pragma once

#include "qunity/typecheck.hpp"

namespace qunity {

// Re-validates a derivation against the literal rule schemas: context
// well-formedness, premise shapes, permutation validity, relevance, and the
// stored side-judgment certificates.

namespace detail {

inline void require(bool cond, const char *what) {
    if (!cond)
        throw InternalError(std::string("derivation re-validation failed: ") + what);
}

inline bool prefix_equal(const Context &whole, const Context &part, int from) {
    for (std::size_t i = 0; i < part.size(); ++i) {
        std::size_t k = static_cast<std::size_t>(from) + i;
        if (k >= whole.size() || whole[k].name != part[i].name ||
            !type_equal(whole[k].type, part[i].type))
            return false;
    }
    return true;
}

} // namespace detail

inline void validate(const DerivPtr &d) {
    using detail::require;
    require(context_wellformed(d->classical) && context_wellformed(d->quantum),
            "context not well-formed");
    if (d->kind == JudgmentKind::PureExpr) {
        for (const auto &b : d->quantum)
            require(context_find(d->classical, b.name) < 0,
                    "classical and quantum contexts overlap");
        // relevance: every quantum variable occurs in the expression
        auto fv = free_vars(d->expr);
        for (const auto &b : d->quantum)
            require(fv.count(b.name) > 0, "relevance: unused quantum variable");
    }
    for (const auto &p : d->premises)
        validate(p);

    switch (d->rule) {
    case Rule::TUnit:
        require(d->quantum.empty() && d->expr->kind == Expr::Kind::Unit &&
                    d->type->kind == DataType::Kind::Unit,
                "T-Unit schema");
        break;
    case Rule::TCvar: {
        require(d->quantum.empty() && d->expr->kind == Expr::Kind::Var, "T-Cvar schema");
        int i = context_find(d->classical, d->expr->var);
        require(i >= 0 && type_equal(d->classical[static_cast<std::size_t>(i)].type, d->type),
                "T-Cvar binding");
        break;
    }
    case Rule::TQvar:
        require(d->quantum.size() == 1 && d->expr->kind == Expr::Kind::Var &&
                    d->quantum[0].name == d->expr->var &&
                    type_equal(d->quantum[0].type, d->type) &&
                    context_find(d->classical, d->expr->var) < 0,
                "T-Qvar schema");
        break;
    case Rule::TPurePair:
    case Rule::TMixedPair: {
        require(d->premises.size() == 2 && d->expr->kind == Expr::Kind::Pair, "pair premises");
        const auto &p0 = d->premises[0];
        const auto &p1 = d->premises[1];
        int ns = d->n_shared, n0 = d->n_first, n1 = d->n_second;
        require(static_cast<int>(d->quantum.size()) == ns + n0 + n1, "pair split sizes");
        Context shared(d->quantum.begin(), d->quantum.begin() + ns);
        Context c0(d->quantum.begin() + ns, d->quantum.begin() + ns + n0);
        Context c1(d->quantum.begin() + ns + n0, d->quantum.end());
        require(context_equal(p0->quantum, detail::concat(shared, c0)), "pair premise 0 context");
        require(context_equal(p1->quantum, detail::concat(shared, c1)), "pair premise 1 context");
        require(type_equal(d->type, prod_type(p0->type, p1->type)), "pair type");
        if (d->rule == Rule::TPurePair) {
            require(context_equal(p0->classical, d->classical) &&
                        context_equal(p1->classical, d->classical),
                    "pair classical contexts");
            require(p0->kind == JudgmentKind::PureExpr && p1->kind == JudgmentKind::PureExpr,
                    "pure pair premise kinds");
        } else {
            require(p0->kind == JudgmentKind::MixedExpr && p1->kind == JudgmentKind::MixedExpr,
                    "mixed pair premise kinds");
        }
        break;
    }
    case Rule::TPureApp:
    case Rule::TMixedApp: {
        require(d->premises.size() == 2 && d->expr->kind == Expr::Kind::App, "app premises");
        const auto &df = d->premises[0];
        const auto &de = d->premises[1];
        require(df->kind == JudgmentKind::Prog, "app program premise");
        require(type_equal(de->type, df->prog_type.domain) &&
                    type_equal(d->type, df->prog_type.codomain),
                "app types");
        if (d->rule == Rule::TPureApp)
            require(df->prog_type.coherent && de->kind == JudgmentKind::PureExpr &&
                        context_equal(de->classical, d->classical) &&
                        context_equal(de->quantum, d->quantum),
                    "pure app premise");
        else
            require(!df->prog_type.coherent && de->kind == JudgmentKind::MixedExpr &&
                        context_equal(de->quantum, d->quantum),
                    "mixed app premise");
        break;
    }
    case Rule::TPurePerm: {
        require(d->premises.size() == 1, "perm premise count");
        const auto &p = d->premises[0];
        require(d->perm_classical.size() == d->classical.size() &&
                    d->perm_quantum.size() == d->quantum.size(),
                "perm lengths");
        for (std::size_t i = 0; i < d->classical.size(); ++i) {
            const auto &b = p->classical[static_cast<std::size_t>(d->perm_classical[i])];
            require(b.name == d->classical[i].name && type_equal(b.type, d->classical[i].type),
                    "classical permutation");
        }
        for (std::size_t i = 0; i < d->quantum.size(); ++i) {
            const auto &b = p->quantum[static_cast<std::size_t>(d->perm_quantum[i])];
            require(b.name == d->quantum[i].name && type_equal(b.type, d->quantum[i].type),
                    "quantum permutation");
        }
        require(type_equal(p->type, d->type), "perm type");
        break;
    }
    case Rule::TMixedPerm: {
        require(d->premises.size() == 1, "perm premise count");
        const auto &p = d->premises[0];
        require(d->perm_quantum.size() == d->quantum.size(), "perm lengths");
        for (std::size_t i = 0; i < d->quantum.size(); ++i) {
            const auto &b = p->quantum[static_cast<std::size_t>(d->perm_quantum[i])];
            require(b.name == d->quantum[i].name && type_equal(b.type, d->quantum[i].type),
                    "quantum permutation");
        }
        require(type_equal(p->type, d->type), "perm type");
        break;
    }
    case Rule::TCtrl: {
        std::size_t n = d->expr->branches.size();
        require(d->premises.size() == 1 + 2 * n, "ctrl premise count");
        require(d->branch_ctx.size() == n, "ctrl branch contexts");
        const auto &ds = d->premises[0];
        require(ds->kind == JudgmentKind::MixedExpr, "ctrl scrutinee premise kind");
        Context cls_shared(d->classical.begin(), d->classical.begin() + d->n_cls_shared);
        Context qud_shared(d->quantum.begin(), d->quantum.begin() + d->n_qud_shared);
        require(context_equal(ds->quantum, detail::concat(cls_shared, qud_shared)),
                "ctrl scrutinee context");
        require(type_equal(ds->type, d->expr->scrutinee_type), "ctrl scrutinee type");
        require(d->ortho != nullptr && d->ortho->kept.size() == n, "ctrl ortho certificate");
        require(static_cast<int>(d->erases.size()) == d->n_qud_shared,
                "ctrl erasure certificates");
        for (std::size_t j = 0; j < n; ++j) {
            const auto &dp = d->premises[1 + j];
            const auto &db = d->premises[1 + n + j];
            require(dp->kind == JudgmentKind::PureExpr && dp->classical.empty() &&
                        context_equal(dp->quantum, d->branch_ctx[j]) &&
                        type_equal(dp->type, d->expr->scrutinee_type),
                    "ctrl pattern premise");
            require(expr_equal(d->ortho->kept[j], d->expr->branches[j].pattern),
                    "ctrl ortho patterns");
            require(db->kind == JudgmentKind::PureExpr &&
                        context_equal(db->classical,
                                      detail::concat(d->classical, d->branch_ctx[j])) &&
                        context_equal(db->quantum, d->quantum) &&
                        type_equal(db->type, d->expr->result_type),
                    "ctrl body premise");
        }
        // re-run the side judgments
        {
            std::vector<ExprPtr> pats, bodies;
            for (const auto &br : d->expr->branches) {
                pats.push_back(br.pattern);
                bodies.push_back(br.body);
            }
            check_ortho(d->expr->scrutinee_type, pats);
            for (int i = 0; i < d->n_qud_shared; ++i)
                check_erases(d->expr->result_type, d->quantum[static_cast<std::size_t>(i)].name,
                             bodies);
        }
        break;
    }
    case Rule::TMix: {
        require(d->premises.size() == 1, "mix premise count");
        const auto &p = d->premises[0];
        require(p->kind == JudgmentKind::PureExpr && p->classical.empty() &&
                    context_equal(p->quantum, d->quantum) && type_equal(p->type, d->type),
                "T-Mix schema");
        break;
    }
    case Rule::TTry: {
        require(d->premises.size() == 2 && d->expr->kind == Expr::Kind::TryCatch,
                "try premises");
        const auto &p0 = d->premises[0];
        const auto &p1 = d->premises[1];
        require(static_cast<int>(d->quantum.size()) == d->n_first + d->n_second,
                "try split sizes");
        Context c0(d->quantum.begin(), d->quantum.begin() + d->n_first);
        Context c1(d->quantum.begin() + d->n_first, d->quantum.end());
        require(context_equal(p0->quantum, c0) && context_equal(p1->quantum, c1),
                "try premise contexts");
        require(type_equal(p0->type, d->type) && type_equal(p1->type, d->type), "try types");
        break;
    }
    case Rule::TGate:
        require(d->prog->kind == Prog::Kind::U3 && d->prog_type.coherent &&
                    type_equal(d->prog_type.domain, bit_type()) &&
                    type_equal(d->prog_type.codomain, bit_type()),
                "T-Gate schema");
        break;
    case Rule::TLeft:
        require(d->prog->kind == Prog::Kind::Left && d->prog_type.coherent &&
                    type_equal(d->prog_type.domain, d->prog->t0) &&
                    type_equal(d->prog_type.codomain, sum_type(d->prog->t0, d->prog->t1)),
                "T-Left schema");
        break;
    case Rule::TRight:
        require(d->prog->kind == Prog::Kind::Right && d->prog_type.coherent &&
                    type_equal(d->prog_type.domain, d->prog->t1) &&
                    type_equal(d->prog_type.codomain, sum_type(d->prog->t0, d->prog->t1)),
                "T-Right schema");
        break;
    case Rule::TPureAbs: {
        require(d->premises.size() == 2 && d->prog->kind == Prog::Kind::Abs, "abs premises");
        const auto &dp = d->premises[0];
        const auto &db = d->premises[1];
        require(dp->kind == JudgmentKind::PureExpr && db->kind == JudgmentKind::PureExpr &&
                    dp->classical.empty() && db->classical.empty() &&
                    context_equal(dp->quantum, db->quantum),
                "T-PureAbs contexts");
        require(type_equal(dp->type, d->prog_type.domain) &&
                    type_equal(db->type, d->prog_type.codomain) && d->prog_type.coherent,
                "T-PureAbs types");
        break;
    }
    case Rule::TRphase: {
        require(d->premises.size() == 1 && d->prog->kind == Prog::Kind::Rphase,
                "rphase premise");
        const auto &dp = d->premises[0];
        require(dp->kind == JudgmentKind::PureExpr && dp->classical.empty() &&
                    type_equal(dp->type, d->prog->domain) &&
                    type_equal(d->prog_type.domain, d->prog->domain) &&
                    type_equal(d->prog_type.codomain, d->prog->domain),
                "T-Rphase schema");
        break;
    }
    case Rule::TChannel: {
        require(d->premises.size() == 1 && !d->prog_type.coherent, "channel premise");
        const auto &p = d->premises[0];
        require(p->kind == JudgmentKind::Prog && p->prog_type.coherent &&
                    type_equal(p->prog_type.domain, d->prog_type.domain) &&
                    type_equal(p->prog_type.codomain, d->prog_type.codomain),
                "T-Channel schema");
        break;
    }
    case Rule::TMixedAbs: {
        require(d->premises.size() == 2 && d->prog->kind == Prog::Kind::Abs &&
                    !d->prog_type.coherent,
                "T-MixedAbs schema");
        const auto &dp = d->premises[0];
        const auto &db = d->premises[1];
        require(dp->kind == JudgmentKind::PureExpr && dp->classical.empty() &&
                    db->kind == JudgmentKind::MixedExpr,
                "T-MixedAbs premise kinds");
        require(d->n_kept >= 0 &&
                    static_cast<std::size_t>(d->n_kept) <= dp->quantum.size() &&
                    detail::prefix_equal(dp->quantum, db->quantum, 0) &&
                    static_cast<int>(db->quantum.size()) == d->n_kept,
                "T-MixedAbs context split");
        require(type_equal(dp->type, d->prog_type.domain) &&
                    type_equal(db->type, d->prog_type.codomain),
                "T-MixedAbs types");
        break;
    }
    }
}

} // namespace qunity
