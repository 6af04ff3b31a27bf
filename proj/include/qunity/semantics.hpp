#pragma once

#include <vector>

#include "qunity/matrix.hpp"
#include "qunity/typecheck.hpp"

namespace qunity {

// Evaluates typing derivations to dense operators: pure judgments become
// Kraus operators indexed by the canonical value bases, mixed judgments
// become superoperators on vectorized density matrices.

CMat pure_expr_sem(const DerivPtr &d, const Valuation &sigma);
Superop mixed_expr_sem(const DerivPtr &d);
CMat pure_prog_sem(const DerivPtr &d);
Superop mixed_prog_sem(const DerivPtr &d);

namespace detail {

// For each index over the conclusion context, the corresponding index over
// the premise context, where conclusion[i] = premise[perm[i]].
inline std::vector<std::uint64_t> perm_index_map(const Context &conclusion,
                                                 const Context &premise,
                                                 const std::vector<int> &perm) {
    std::uint64_t dim = context_dimension(conclusion);
    std::vector<std::uint64_t> map(dim);
    for (std::uint64_t ic = 0; ic < dim; ++ic) {
        Valuation vc = valuation_at(conclusion, ic);
        Valuation vp(vc.size());
        for (std::size_t i = 0; i < vc.size(); ++i)
            vp[static_cast<std::size_t>(perm[i])] = vc[i];
        map[ic] = valuation_index(premise, vp);
    }
    return map;
}

} // namespace detail

inline CMat pure_expr_sem(const DerivPtr &d, const Valuation &sigma) {
    std::uint64_t out_dim = cardinality(d->type);
    std::uint64_t in_dim = context_dimension(d->quantum);
    switch (d->rule) {
    case Rule::TUnit:
        return CMat::Ones(1, 1);
    case Rule::TCvar: {
        CMat m = CMat::Zero(static_cast<Eigen::Index>(out_dim), 1);
        m(static_cast<Eigen::Index>(value_index(valuation_lookup(sigma, d->expr->var))), 0) = 1.0;
        return m;
    }
    case Rule::TQvar:
        return CMat::Identity(static_cast<Eigen::Index>(out_dim),
                              static_cast<Eigen::Index>(out_dim));
    case Rule::TPurePair: {
        const DerivPtr &p0 = d->premises[0];
        const DerivPtr &p1 = d->premises[1];
        CMat m0 = pure_expr_sem(p0, sigma);
        CMat m1 = pure_expr_sem(p1, sigma);
        std::uint64_t ds = 1, d0 = 1, d1 = 1;
        for (int i = 0; i < d->n_shared; ++i)
            ds *= cardinality(d->quantum[static_cast<std::size_t>(i)].type);
        for (int i = 0; i < d->n_first; ++i)
            d0 *= cardinality(d->quantum[static_cast<std::size_t>(d->n_shared + i)].type);
        for (int i = 0; i < d->n_second; ++i)
            d1 *= cardinality(
                d->quantum[static_cast<std::size_t>(d->n_shared + d->n_first + i)].type);
        CMat m(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
        for (std::uint64_t is = 0; is < ds; ++is)
            for (std::uint64_t i0 = 0; i0 < d0; ++i0)
                for (std::uint64_t i1 = 0; i1 < d1; ++i1) {
                    std::uint64_t ic = (is * d0 + i0) * d1 + i1;
                    CVec c0 = m0.col(static_cast<Eigen::Index>(is * d0 + i0));
                    CVec c1 = m1.col(static_cast<Eigen::Index>(is * d1 + i1));
                    CMat k = tensor(c0, c1);
                    m.col(static_cast<Eigen::Index>(ic)) = k.col(0);
                }
        return m;
    }
    case Rule::TPureApp:
        return pure_prog_sem(d->premises[0]) * pure_expr_sem(d->premises[1], sigma);
    case Rule::TPurePerm: {
        const DerivPtr &inner = d->premises[0];
        Valuation sp = unpermute_valuation(sigma, d->perm_classical);
        CMat mi = pure_expr_sem(inner, sp);
        auto map = detail::perm_index_map(d->quantum, inner->quantum, d->perm_quantum);
        CMat m(mi.rows(), mi.cols());
        for (std::uint64_t ic = 0; ic < in_dim; ++ic)
            m.col(static_cast<Eigen::Index>(ic)) = mi.col(static_cast<Eigen::Index>(map[ic]));
        return m;
    }
    case Rule::TCtrl: {
        std::size_t n = d->branch_ctx.size();
        const DerivPtr &d_scrut = d->premises[0];
        Superop emix = mixed_expr_sem(d_scrut);
        std::uint64_t dim_t = cardinality(d_scrut->type);

        Valuation sigma_shared(sigma.begin(), sigma.begin() + d->n_cls_shared);

        // S_v = sum over branches j and classical branch valuations sigma_j of
        //       <sigma_j| [[e_j]]^dagger |v> . [[e_j']]_{sigma, sigma_j}
        std::vector<CMat> s_v(dim_t,
                              CMat::Zero(static_cast<Eigen::Index>(out_dim),
                                         static_cast<Eigen::Index>(in_dim)));
        for (std::size_t j = 0; j < n; ++j) {
            CMat pj = pure_expr_sem(d->premises[1 + j], Valuation{});
            std::uint64_t gdim = context_dimension(d->branch_ctx[j]);
            for (std::uint64_t ig = 0; ig < gdim; ++ig) {
                Valuation sj = valuation_at(d->branch_ctx[j], ig);
                CMat body = pure_expr_sem(d->premises[1 + n + j],
                                          concat_valuation(sigma, sj));
                for (std::uint64_t v = 0; v < dim_t; ++v) {
                    Complex w = std::conj(pj(static_cast<Eigen::Index>(v),
                                             static_cast<Eigen::Index>(ig)));
                    if (w != Complex(0.0, 0.0))
                        s_v[v] += w * body;
                }
            }
        }

        // probability weights from the mixed scrutinee, per shared-context column
        Context merged = d_scrut->quantum;
        std::uint64_t dim_shared = 1;
        for (int i = 0; i < d->n_qud_shared; ++i)
            dim_shared *= cardinality(d->quantum[static_cast<std::size_t>(i)].type);
        std::uint64_t dim_rest = in_dim / std::max<std::uint64_t>(dim_shared, 1);

        CMat m = CMat::Zero(static_cast<Eigen::Index>(out_dim),
                            static_cast<Eigen::Index>(in_dim));
        for (std::uint64_t is = 0; is < dim_shared; ++is) {
            Valuation tau_shared =
                valuation_at(Context(d->quantum.begin(), d->quantum.begin() + d->n_qud_shared),
                             is);
            std::uint64_t im =
                valuation_index(merged, concat_valuation(sigma_shared, tau_shared));
            std::uint64_t dm = context_dimension(merged);
            CVec rho_v = emix.m.col(static_cast<Eigen::Index>(im * dm + im));
            for (std::uint64_t ir = 0; ir < dim_rest; ++ir) {
                std::uint64_t ic = is * dim_rest + ir;
                CVec col = CVec::Zero(static_cast<Eigen::Index>(out_dim));
                for (std::uint64_t v = 0; v < dim_t; ++v) {
                    Complex p = rho_v(static_cast<Eigen::Index>(v * dim_t + v));
                    if (p != Complex(0.0, 0.0))
                        col += p * s_v[v].col(static_cast<Eigen::Index>(ic));
                }
                m.col(static_cast<Eigen::Index>(ic)) = col;
            }
        }
        return m;
    }
    default:
        throw InternalError("not a pure expression rule: " + std::string(rule_name(d->rule)));
    }
}

inline Superop mixed_expr_sem(const DerivPtr &d) {
    std::uint64_t out_dim = cardinality(d->type);
    std::uint64_t in_dim = context_dimension(d->quantum);
    switch (d->rule) {
    case Rule::TMix:
        return conjugation_superop(pure_expr_sem(d->premises[0], Valuation{}));
    case Rule::TMixedPerm: {
        const DerivPtr &inner = d->premises[0];
        Superop si = mixed_expr_sem(inner);
        auto map = detail::perm_index_map(d->quantum, inner->quantum, d->perm_quantum);
        Superop s = superop_zero(static_cast<Eigen::Index>(in_dim),
                                 static_cast<Eigen::Index>(out_dim));
        for (std::uint64_t i = 0; i < in_dim; ++i)
            for (std::uint64_t j = 0; j < in_dim; ++j)
                s.m.col(static_cast<Eigen::Index>(i * in_dim + j)) =
                    si.m.col(static_cast<Eigen::Index>(map[i] * in_dim + map[j]));
        return s;
    }
    case Rule::TMixedPair: {
        Superop s0 = mixed_expr_sem(d->premises[0]);
        Superop s1 = mixed_expr_sem(d->premises[1]);
        std::uint64_t ds = 1, d0 = 1, d1 = 1;
        for (int i = 0; i < d->n_shared; ++i)
            ds *= cardinality(d->quantum[static_cast<std::size_t>(i)].type);
        for (int i = 0; i < d->n_first; ++i)
            d0 *= cardinality(d->quantum[static_cast<std::size_t>(d->n_shared + i)].type);
        for (int i = 0; i < d->n_second; ++i)
            d1 *= cardinality(
                d->quantum[static_cast<std::size_t>(d->n_shared + d->n_first + i)].type);
        auto split = [&](std::uint64_t i, std::uint64_t &is, std::uint64_t &i0,
                         std::uint64_t &i1) {
            i1 = i % d1;
            i0 = (i / d1) % d0;
            is = i / (d0 * d1);
        };
        Superop s = superop_zero(static_cast<Eigen::Index>(in_dim),
                                 static_cast<Eigen::Index>(out_dim));
        for (std::uint64_t i = 0; i < in_dim; ++i)
            for (std::uint64_t j = 0; j < in_dim; ++j) {
                std::uint64_t is, i0, i1, js, j0, j1;
                split(i, is, i0, i1);
                split(j, js, j0, j1);
                std::uint64_t din0 = ds * d0, din1 = ds * d1;
                CMat rho0 = unvec_rm(s0.m.col(static_cast<Eigen::Index>(
                                         (is * d0 + i0) * din0 + (js * d0 + j0))),
                                     s0.dim_out);
                CMat rho1 = unvec_rm(s1.m.col(static_cast<Eigen::Index>(
                                         (is * d1 + i1) * din1 + (js * d1 + j1))),
                                     s1.dim_out);
                s.m.col(static_cast<Eigen::Index>(i * in_dim + j)) = vec_rm(tensor(rho0, rho1));
            }
        return s;
    }
    case Rule::TTry: {
        Superop s0 = mixed_expr_sem(d->premises[0]);
        Superop s1 = mixed_expr_sem(d->premises[1]);
        std::uint64_t d0 = static_cast<std::uint64_t>(1), d1 = static_cast<std::uint64_t>(1);
        for (int i = 0; i < d->n_first; ++i)
            d0 *= cardinality(d->quantum[static_cast<std::size_t>(i)].type);
        for (int i = 0; i < d->n_second; ++i)
            d1 *= cardinality(d->quantum[static_cast<std::size_t>(d->n_first + i)].type);
        Superop s = superop_zero(static_cast<Eigen::Index>(in_dim),
                                 static_cast<Eigen::Index>(out_dim));
        for (std::uint64_t i = 0; i < in_dim; ++i)
            for (std::uint64_t j = 0; j < in_dim; ++j) {
                std::uint64_t i0 = i / d1, i1 = i % d1;
                std::uint64_t j0 = j / d1, j1 = j % d1;
                CMat rho0 =
                    unvec_rm(s0.m.col(static_cast<Eigen::Index>(i0 * d0 + j0)), s0.dim_out);
                CMat rho1 =
                    unvec_rm(s1.m.col(static_cast<Eigen::Index>(i1 * d1 + j1)), s1.dim_out);
                // the failure weight pairs the identity with the trace: on basis
                // outer-products the "1" reads as a Kronecker delta, keeping the
                // map linear and trace-non-increasing
                Complex unit = i0 == j0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
                CMat out = rho0 + (unit - rho0.trace()) * rho1;
                s.m.col(static_cast<Eigen::Index>(i * in_dim + j)) = vec_rm(out);
            }
        return s;
    }
    case Rule::TMixedApp:
        return superop_compose(mixed_prog_sem(d->premises[0]),
                               mixed_expr_sem(d->premises[1]));
    default:
        throw InternalError("not a mixed expression rule: " + std::string(rule_name(d->rule)));
    }
}

inline CMat pure_prog_sem(const DerivPtr &d) {
    switch (d->rule) {
    case Rule::TGate: {
        double th = eval_real(d->prog->theta);
        double ph = eval_real(d->prog->phi);
        double la = eval_real(d->prog->lam);
        CMat m(2, 2);
        m(0, 0) = std::cos(th / 2);
        m(0, 1) = -std::exp(Complex(0, la)) * std::sin(th / 2);
        m(1, 0) = std::exp(Complex(0, ph)) * std::sin(th / 2);
        m(1, 1) = std::exp(Complex(0, ph + la)) * std::cos(th / 2);
        return m;
    }
    case Rule::TLeft: {
        std::uint64_t d0 = cardinality(d->prog->t0);
        std::uint64_t d1 = cardinality(d->prog->t1);
        CMat m = CMat::Zero(static_cast<Eigen::Index>(d0 + d1), static_cast<Eigen::Index>(d0));
        m.topLeftCorner(static_cast<Eigen::Index>(d0), static_cast<Eigen::Index>(d0)) =
            CMat::Identity(static_cast<Eigen::Index>(d0), static_cast<Eigen::Index>(d0));
        return m;
    }
    case Rule::TRight: {
        std::uint64_t d0 = cardinality(d->prog->t0);
        std::uint64_t d1 = cardinality(d->prog->t1);
        CMat m = CMat::Zero(static_cast<Eigen::Index>(d0 + d1), static_cast<Eigen::Index>(d1));
        m.bottomRightCorner(static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(d1)) =
            CMat::Identity(static_cast<Eigen::Index>(d1), static_cast<Eigen::Index>(d1));
        return m;
    }
    case Rule::TPureAbs: {
        CMat pat = pure_expr_sem(d->premises[0], Valuation{});
        CMat body = pure_expr_sem(d->premises[1], Valuation{});
        return body * pat.adjoint();
    }
    case Rule::TRphase: {
        CMat p = pure_expr_sem(d->premises[0], Valuation{});
        CMat proj = p * p.adjoint();
        CMat eye = CMat::Identity(proj.rows(), proj.cols());
        Complex em = std::exp(Complex(0, eval_real(d->prog->r_match)));
        Complex eo = std::exp(Complex(0, eval_real(d->prog->r_ortho)));
        return em * proj + eo * (eye - proj);
    }
    default:
        throw InternalError("not a pure program rule: " + std::string(rule_name(d->rule)));
    }
}

inline Superop mixed_prog_sem(const DerivPtr &d) {
    switch (d->rule) {
    case Rule::TChannel:
        return conjugation_superop(pure_prog_sem(d->premises[0]));
    case Rule::TMixedAbs: {
        const DerivPtr &d_pat = d->premises[0];
        const DerivPtr &d_body = d->premises[1];
        CMat pat = pure_expr_sem(d_pat, Valuation{});
        Superop body = mixed_expr_sem(d_body);
        std::uint64_t dim_v = cardinality(d->prog_type.domain);
        std::uint64_t keep = 1, disc = 1;
        for (std::size_t i = 0; i < d_pat->quantum.size(); ++i) {
            if (static_cast<int>(i) < d->n_kept)
                keep *= cardinality(d_pat->quantum[i].type);
            else
                disc *= cardinality(d_pat->quantum[i].type);
        }
        Superop s = superop_zero(static_cast<Eigen::Index>(dim_v), body.dim_out);
        CMat pat_adj = pat.adjoint();
        for (std::uint64_t v = 0; v < dim_v; ++v)
            for (std::uint64_t w = 0; w < dim_v; ++w) {
                CMat inner = pat_adj.col(static_cast<Eigen::Index>(v)) *
                             pat_adj.col(static_cast<Eigen::Index>(w)).adjoint();
                CMat reduced = partial_trace(inner, static_cast<Eigen::Index>(keep),
                                             static_cast<Eigen::Index>(disc));
                s.m.col(static_cast<Eigen::Index>(v * dim_v + w)) = vec_rm(body.apply(reduced));
            }
        return s;
    }
    default:
        // A coherent derivation used where a channel is expected.
        return conjugation_superop(pure_prog_sem(d));
    }
}

} // namespace qunity
