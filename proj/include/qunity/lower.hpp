#pragma once

#include <algorithm>
#include <vector>

#include "qunity/circuit.hpp"
#include "qunity/typecheck.hpp"

namespace qunity {

// Lowers typing derivations to qubit circuits with prep/flag/garbage
// registers. Compilation is a recursive function of the derivation, mirroring
// the denotational semantics rule by rule.

LowLevelCircuit compile(const DerivPtr &d);

// ---------------------------------------------------------------------------
// Assembly helpers
// ---------------------------------------------------------------------------

namespace lower_detail {

struct Placed {
    std::vector<int> out, flag, garb;
};

struct Builder {
    int total = 0;
    std::vector<Gate> gates;

    std::vector<int> alloc(int n) {
        std::vector<int> s;
        s.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            s.push_back(total++);
        return s;
    }

    // Appends a sub-circuit with its qubits mapped onto the given parent
    // slots, optionally wrapping every gate in extra controls.
    Placed place(const LowLevelCircuit &sub, const std::vector<int> &ctx,
                 const std::vector<int> &in, const std::vector<int> &preps,
                 const std::vector<std::pair<int, bool>> &ctrls = {}) {
        std::vector<int> slots = ctx;
        slots.insert(slots.end(), in.begin(), in.end());
        slots.insert(slots.end(), preps.begin(), preps.end());
        if (static_cast<int>(slots.size()) != sub.total)
            throw InternalError("sub-circuit placement: slot count mismatch");
        for (const Gate &g : sub.gates) {
            Gate rg = remap_gate(g, slots);
            gates.push_back(ctrls.empty() ? rg : gate_controlled(ctrls, rg));
        }
        Placed p;
        for (int i = 0; i < sub.out_data; ++i)
            p.out.push_back(slots[static_cast<std::size_t>(sub.context + i)]);
        for (int i = 0; i < sub.flag; ++i)
            p.flag.push_back(slots[static_cast<std::size_t>(sub.context + sub.out_data + i)]);
        for (int i = 0; i < sub.garb; ++i)
            p.garb.push_back(
                slots[static_cast<std::size_t>(sub.context + sub.out_data + sub.flag + i)]);
        return p;
    }
};

// Canonicalizes the output layout ([context][out][flag][garbage]) with a
// final layer of swap gates. The input layout is fixed by allocation order:
// context first, then in_data, then preps.
inline LowLevelCircuit finalize(Builder &b, const std::vector<int> &ctx_slots, int in_data,
                                const std::vector<int> &out_slots,
                                const std::vector<int> &garb_slots) {
    int n = b.total;
    std::vector<int> target(static_cast<std::size_t>(n), -1);
    int pos = 0;
    for (int s : ctx_slots)
        target[static_cast<std::size_t>(s)] = pos++;
    for (int s : out_slots)
        target[static_cast<std::size_t>(s)] = pos++;
    int garb_start = n - static_cast<int>(garb_slots.size());
    {
        int gp = garb_start;
        for (int s : garb_slots)
            target[static_cast<std::size_t>(s)] = gp++;
    }
    for (int s = 0; s < n; ++s)
        if (target[static_cast<std::size_t>(s)] < 0)
            target[static_cast<std::size_t>(s)] = pos++;
    if (pos != garb_start)
        throw InternalError("register accounting error in finalize");
    emit_wire_permutation(b.gates, target);
    LowLevelCircuit c;
    c.total = n;
    c.context = static_cast<int>(ctx_slots.size());
    c.in_data = in_data;
    c.prep = n - c.context - in_data;
    c.out_data = static_cast<int>(out_slots.size());
    c.garb = static_cast<int>(garb_slots.size());
    c.flag = n - c.context - c.out_data - c.garb;
    c.gates = std::move(b.gates);
    c.check_invariants();
    return c;
}

inline std::vector<int> slice(const std::vector<int> &v, int from, int count) {
    return std::vector<int>(v.begin() + from, v.begin() + from + count);
}

inline std::vector<int> concat_slots(const std::vector<int> &a, const std::vector<int> &b) {
    std::vector<int> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline int ceil_log2(std::size_t n) {
    int w = 0;
    while ((1ull << w) < n)
        ++w;
    return w;
}

} // namespace lower_detail

// ---------------------------------------------------------------------------
// Primitive constructions
// ---------------------------------------------------------------------------

// The share gate: a ladder of CNOTs copying a value in the standard basis,
// implementing sum_v |v,v><v|.
inline LowLevelCircuit share_circuit(const TypePtr &t) {
    int s = type_size(t);
    LowLevelCircuit c;
    c.in_data = s;
    c.prep = s;
    c.out_data = 2 * s;
    c.total = 2 * s;
    for (int i = 0; i < s; ++i)
        c.gates.push_back(gate_cnot(i, s + i));
    c.check_invariants();
    return c;
}

// Direct sum injections: a fresh tag qubit rotated ahead of the payload,
// with unused payload qubits prepared |0>.
inline LowLevelCircuit inject_circuit(const TypePtr &t0, const TypePtr &t1, bool is_left) {
    int s0 = type_size(t0);
    int s1 = type_size(t1);
    int m = std::max(s0, s1);
    int payload = is_left ? s0 : s1;
    LowLevelCircuit c;
    c.in_data = payload;
    c.prep = 1 + m - payload;
    c.out_data = 1 + m;
    c.total = 1 + m;
    for (int i = payload; i >= 1; --i)
        c.gates.push_back(gate_swap(i - 1, i));
    if (!is_left)
        c.gates.push_back(gate_x(0));
    c.check_invariants();
    return c;
}

inline LowLevelCircuit inject_left(const TypePtr &t0, const TypePtr &t1) {
    return inject_circuit(t0, t1, true);
}

inline LowLevelCircuit inject_right(const TypePtr &t0, const TypePtr &t1) {
    return inject_circuit(t0, t1, false);
}

// Associativity isomorphism (T1 (+) T2) (+) T3  ->  T1 (+) (T2 (+) T3),
// realized by conditionally shifting the tag bits.
inline LowLevelCircuit assoc_circuit(const TypePtr &t1, const TypePtr &t2, const TypePtr &t3) {
    int s1 = type_size(t1), s2 = type_size(t2), s3 = type_size(t3);
    int nmax = std::max({s1, s2, s3});
    int size_lhs = type_size(sum_type(sum_type(t1, t2), t3));
    int size_rhs = type_size(sum_type(t1, sum_type(t2, t3)));
    LowLevelCircuit c;
    c.total = 2 + nmax;
    c.in_data = size_lhs;
    c.prep = c.total - size_lhs;
    c.out_data = size_rhs;
    c.flag = c.total - size_rhs;
    c.check_invariants();
    int k = 1 + nmax; // block width, slots 1 .. 1+nmax
    // rsh on the block when the outer tag is 1
    for (int i = k - 1; i >= 1; --i)
        c.gates.push_back(gate_controlled({{0, true}}, gate_swap(i, i + 1)));
    c.gates.push_back(gate_controlled({{0, true}}, gate_x(1)));
    c.gates.push_back(gate_swap(0, 1));
    // lsh on the block when the (new) outer tag is 0
    for (int i = 1; i <= k - 1; ++i)
        c.gates.push_back(gate_controlled({{0, false}}, gate_swap(i, i + 1)));
    return c;
}

// Distributivity isomorphism H(T) (x) (H(T0) (+) H(T1)) -> (T (x) T0) (+) (T (x) T1):
// a pure qubit reordering moving the tag ahead of the T payload.
inline LowLevelCircuit distr_circuit(const TypePtr &t, const TypePtr &t0, const TypePtr &t1) {
    int st = type_size(t);
    int m = std::max(type_size(t0), type_size(t1));
    LowLevelCircuit c;
    c.total = st + 1 + m;
    c.in_data = c.total;
    c.out_data = c.total;
    for (int i = st; i >= 1; --i)
        c.gates.push_back(gate_swap(i - 1, i));
    c.check_invariants();
    return c;
}

// Norm-preserving wrap of a Kraus operator into H' (+) H_f: an indicator
// qubit records whether any flag fired; composing with left^dagger recovers
// the original operator.
struct PureErrorWrapped {
    LowLevelCircuit circuit;
    int flag_space; // qubit width of H_f
};

inline PureErrorWrapped pure_error_wrap(const LowLevelCircuit &c) {
    if (c.context != 0 || c.garb != 0)
        throw InternalError("pure_error_wrap expects a context-free pure circuit");
    using namespace lower_detail;
    Builder b;
    std::vector<int> in = b.alloc(c.in_data);
    std::vector<int> ind = b.alloc(1);
    std::vector<int> preps = b.alloc(c.prep);
    Placed p = b.place(c, {}, in, preps);
    if (c.flag > 0) {
        b.gates.push_back(gate_x(ind[0]));
        std::vector<std::pair<int, bool>> zeros;
        for (int q : p.flag)
            zeros.push_back({q, false});
        b.gates.push_back(gate_controlled(zeros, gate_x(ind[0])));
    }
    std::vector<int> out = ind;
    out.insert(out.end(), p.out.begin(), p.out.end());
    out.insert(out.end(), p.flag.begin(), p.flag.end());
    PureErrorWrapped w;
    w.circuit = finalize(b, {}, c.in_data, out, {});
    w.flag_space = c.out_data + c.flag;
    return w;
}

// Trace-preserving wrap of a superoperator circuit into H' (+) C: the
// indicator qubit records failure, and on failure the payload is swapped out
// to garbage and replaced with fresh zeros.
inline LowLevelCircuit cptp_wrap(const LowLevelCircuit &c) {
    if (c.context != 0)
        throw InternalError("cptp_wrap expects a context-free circuit");
    using namespace lower_detail;
    Builder b;
    std::vector<int> in = b.alloc(c.in_data);
    std::vector<int> ind = b.alloc(1);
    std::vector<int> preps = b.alloc(c.prep);
    std::vector<int> fresh = b.alloc(c.out_data);
    Placed p = b.place(c, {}, in, preps);
    if (c.flag > 0) {
        std::vector<std::pair<int, bool>> zeros;
        for (int q : p.flag)
            zeros.push_back({q, false});
        b.gates.push_back(gate_x(ind[0]));
        b.gates.push_back(gate_controlled(zeros, gate_x(ind[0])));
        for (int i = 0; i < c.out_data; ++i) {
            b.gates.push_back(gate_swap(p.out[static_cast<std::size_t>(i)],
                                        fresh[static_cast<std::size_t>(i)]));
            b.gates.push_back(gate_controlled(
                zeros, gate_swap(p.out[static_cast<std::size_t>(i)],
                                 fresh[static_cast<std::size_t>(i)])));
        }
    }
    std::vector<int> out = ind;
    out.insert(out.end(), p.out.begin(), p.out.end());
    std::vector<int> garb = p.flag;
    garb.insert(garb.end(), p.garb.begin(), p.garb.end());
    garb.insert(garb.end(), fresh.begin(), fresh.end());
    return finalize(b, {}, c.in_data, out, garb);
}

// Purification: re-labels the garbage register as an explicit output factor,
// leaving a flag-only (pure) circuit.
inline LowLevelCircuit purify(const LowLevelCircuit &c) {
    LowLevelCircuit out = c;
    std::vector<int> target(static_cast<std::size_t>(c.total));
    for (int i = 0; i < c.total; ++i)
        target[static_cast<std::size_t>(i)] = i;
    int o = c.context + c.out_data;
    for (int i = 0; i < c.flag; ++i)
        target[static_cast<std::size_t>(o + i)] = o + c.garb + i;
    for (int i = 0; i < c.garb; ++i)
        target[static_cast<std::size_t>(o + c.flag + i)] = o + i;
    emit_wire_permutation(out.gates, target);
    out.out_data = c.out_data + c.garb;
    out.garb = 0;
    out.check_invariants();
    return out;
}

// ---------------------------------------------------------------------------
// Orthogonality and erasure compilation
// ---------------------------------------------------------------------------

namespace lower_detail {

// Bit constraints identifying basis states matched by a constructor pattern.
inline void pattern_constraints(const ExprPtr &p, const TypePtr &t, int offset,
                                std::vector<std::pair<int, bool>> &out) {
    switch (p->kind) {
    case Expr::Kind::Unit:
    case Expr::Kind::Var:
        return;
    case Expr::Kind::App:
        if (p->prog->kind == Prog::Kind::Left) {
            out.push_back({offset, false});
            pattern_constraints(p->arg, t->left, offset + 1, out);
            return;
        }
        if (p->prog->kind == Prog::Kind::Right) {
            out.push_back({offset, true});
            pattern_constraints(p->arg, t->right, offset + 1, out);
            return;
        }
        throw InternalError("unsupported application in a certificate pattern");
    case Expr::Kind::Pair:
        pattern_constraints(p->first, t->left, offset, out);
        pattern_constraints(p->second, t->right, offset + type_size(t->left), out);
        return;
    default:
        throw InternalError("unsupported pattern shape in a certificate");
    }
}

} // namespace lower_detail

// Lowers an orthogonality certificate to the branch-tagging operator
// H(T) -> H(T)^{(+)n}: the certificate's constructor tree determines, per
// covered basis state, which branch tag to write; dropped spanning entries
// are zeroed out into a flag.
inline LowLevelCircuit compile_ortho(const OrthoPtr &cert) {
    using namespace lower_detail;
    const TypePtr &t = cert->type;
    int st = type_size(t);
    std::size_t n = cert->kept.size();
    int w = ceil_log2(std::max<std::size_t>(n, 1));
    bool has_drop = !cert->dropped.empty();

    Builder b;
    std::vector<int> in = b.alloc(st);
    std::vector<int> tag = b.alloc(w);
    std::vector<int> fail = has_drop ? b.alloc(1) : std::vector<int>{};

    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::pair<int, bool>> ctrls;
        pattern_constraints(cert->kept[j], t, 0, ctrls);
        for (int bit = 0; bit < w; ++bit) {
            if ((j >> (w - 1 - bit)) & 1u)
                b.gates.push_back(
                    gate_controlled(ctrls, gate_x(tag[static_cast<std::size_t>(bit)])));
        }
    }
    for (const auto &p : cert->dropped) {
        std::vector<std::pair<int, bool>> ctrls;
        pattern_constraints(p, t, 0, ctrls);
        b.gates.push_back(gate_controlled(ctrls, gate_x(fail[0])));
    }

    std::vector<int> out = tag;
    out.insert(out.end(), in.begin(), in.end());
    return finalize(b, {}, st, out, {});
}

// Lowers an erasure certificate to the operator H(T_x) (x) H(T') -> H(T')
// that uncomputes the controlled variable against the branch outputs.
inline LowLevelCircuit compile_erases(const ErasePtr &cert, const TypePtr &tx,
                                      const TypePtr &tprime) {
    using namespace lower_detail;
    int sx = type_size(tx);
    int sp = type_size(tprime);
    switch (cert->kind) {
    case ErasesCert::Kind::Var: {
        // |v, v> -> |v, 0>: the second copy becomes flags
        LowLevelCircuit c;
        c.in_data = sx + sp;
        c.total = sx + sp;
        c.out_data = sp;
        c.flag = sx;
        for (int i = 0; i < sx; ++i)
            c.gates.push_back(gate_cnot(i, sx + i));
        c.check_invariants();
        return c;
    }
    case ErasesCert::Kind::Gphase:
    case ErasesCert::Kind::Ctrl:
        // the inner circuit already has the needed behavior
        return compile_erases(cert->inner, tx, tprime);
    case ErasesCert::Kind::Pair0: {
        LowLevelCircuit sub = compile_erases(cert->inner, tx, tprime->left);
        int s0 = type_size(tprime->left);
        int s1 = type_size(tprime->right);
        Builder b;
        std::vector<int> x = b.alloc(sx);
        std::vector<int> a = b.alloc(s0);
        std::vector<int> bb = b.alloc(s1);
        Placed p = b.place(sub, {}, concat_slots(x, a), {});
        return finalize(b, {}, sx + s0 + s1, concat_slots(p.out, bb), {});
    }
    case ErasesCert::Kind::Pair1: {
        LowLevelCircuit sub = compile_erases(cert->inner, tx, tprime->right);
        int s0 = type_size(tprime->left);
        int s1 = type_size(tprime->right);
        Builder b;
        std::vector<int> x = b.alloc(sx);
        std::vector<int> a = b.alloc(s0);
        std::vector<int> bb = b.alloc(s1);
        Placed p = b.place(sub, {}, concat_slots(x, bb), {});
        return finalize(b, {}, sx + s0 + s1, concat_slots(a, p.out), {});
    }
    }
    throw InternalError("unhandled erasure certificate kind");
}

// ---------------------------------------------------------------------------
// Main compilation
// ---------------------------------------------------------------------------

namespace lower_detail {

inline std::vector<std::pair<int, bool>> tag_controls(const std::vector<int> &tag,
                                                      std::size_t j) {
    std::vector<std::pair<int, bool>> ctrls;
    int w = static_cast<int>(tag.size());
    for (int bit = 0; bit < w; ++bit)
        ctrls.push_back({tag[static_cast<std::size_t>(bit)],
                         ((j >> (w - 1 - bit)) & 1u) != 0});
    return ctrls;
}

// Slot-level permutation realizing a context permutation, used by the
// explicit exchange rules: content of conclusion binding i must move to the
// premise position of binding perm[i].
inline void context_perm_targets(const Context &conclusion, const Context &premise,
                                 const std::vector<int> &perm, int base,
                                 std::vector<int> &target) {
    for (std::size_t i = 0; i < conclusion.size(); ++i) {
        int from = base + context_offset(conclusion, i);
        int to = base + context_offset(premise, static_cast<std::size_t>(perm[i]));
        for (int k = 0; k < type_size(conclusion[i].type); ++k)
            target[static_cast<std::size_t>(from + k)] = to + k;
    }
}

LowLevelCircuit compile_ctrl(const DerivPtr &d);

} // namespace lower_detail

inline LowLevelCircuit compile(const DerivPtr &d) {
    using namespace lower_detail;
    switch (d->rule) {
    case Rule::TUnit: {
        LowLevelCircuit c;
        c.context = context_size(d->classical);
        c.total = c.context;
        c.check_invariants();
        return c;
    }
    case Rule::TCvar: {
        // a controlled share out of the classical register
        int g = context_size(d->classical);
        int i = context_find(d->classical, d->expr->var);
        int off = context_offset(d->classical, static_cast<std::size_t>(i));
        int st = type_size(d->type);
        Builder b;
        std::vector<int> ctx = b.alloc(g);
        std::vector<int> copy = b.alloc(st);
        for (int k = 0; k < st; ++k)
            b.gates.push_back(gate_cnot(ctx[static_cast<std::size_t>(off + k)],
                                        copy[static_cast<std::size_t>(k)]));
        return finalize(b, ctx, 0, copy, {});
    }
    case Rule::TQvar: {
        int g = context_size(d->classical);
        int st = type_size(d->type);
        LowLevelCircuit c;
        c.context = g;
        c.in_data = st;
        c.out_data = st;
        c.total = g + st;
        c.check_invariants();
        return c;
    }
    case Rule::TPurePair:
    case Rule::TMixedPair: {
        LowLevelCircuit s0 = compile(d->premises[0]);
        LowLevelCircuit s1 = compile(d->premises[1]);
        bool pure = d->rule == Rule::TPurePair;
        int g = pure ? context_size(d->classical) : 0;
        Context shared(d->quantum.begin(), d->quantum.begin() + d->n_shared);
        Context c0(d->quantum.begin() + d->n_shared,
                   d->quantum.begin() + d->n_shared + d->n_first);
        Context c1(d->quantum.begin() + d->n_shared + d->n_first, d->quantum.end());
        int ds = context_size(shared), d0 = context_size(c0), d1 = context_size(c1);
        Builder b;
        std::vector<int> C = b.alloc(g);
        std::vector<int> D = b.alloc(ds);
        std::vector<int> D0 = b.alloc(d0);
        std::vector<int> D1 = b.alloc(d1);
        std::vector<int> Dc = b.alloc(ds);
        std::vector<int> p0 = b.alloc(s0.prep);
        std::vector<int> p1 = b.alloc(s1.prep);
        for (int i = 0; i < ds; ++i)
            b.gates.push_back(
                gate_cnot(D[static_cast<std::size_t>(i)], Dc[static_cast<std::size_t>(i)]));
        Placed a0 = b.place(s0, C, concat_slots(D, D0), p0);
        Placed a1 = b.place(s1, C, concat_slots(Dc, D1), p1);
        return finalize(b, C, ds + d0 + d1, concat_slots(a0.out, a1.out),
                        concat_slots(a0.garb, a1.garb));
    }
    case Rule::TPureApp:
    case Rule::TMixedApp: {
        LowLevelCircuit se = compile(d->premises[1]);
        LowLevelCircuit sf = compile(d->premises[0]);
        Builder b;
        std::vector<int> C = b.alloc(se.context);
        std::vector<int> in = b.alloc(se.in_data);
        std::vector<int> pe = b.alloc(se.prep);
        std::vector<int> pf = b.alloc(sf.prep);
        Placed ae = b.place(se, C, in, pe);
        Placed af = b.place(sf, {}, ae.out, pf);
        return finalize(b, C, se.in_data, af.out,
                        concat_slots(ae.garb, af.garb));
    }
    case Rule::TPurePerm: {
        LowLevelCircuit inner = compile(d->premises[0]);
        const DerivPtr &p = d->premises[0];
        int g = context_size(d->classical);
        int dq = context_size(d->quantum);
        Builder b;
        std::vector<int> C = b.alloc(g);
        std::vector<int> D = b.alloc(dq);
        std::vector<int> preps = b.alloc(inner.prep);
        std::vector<int> pre(static_cast<std::size_t>(b.total));
        for (int i = 0; i < b.total; ++i)
            pre[static_cast<std::size_t>(i)] = i;
        context_perm_targets(d->classical, p->classical, d->perm_classical, 0, pre);
        context_perm_targets(d->quantum, p->quantum, d->perm_quantum, g, pre);
        emit_wire_permutation(b.gates, pre);
        Placed a = b.place(inner, C, D, preps);
        // restore the conclusion's classical order
        std::vector<int> post(static_cast<std::size_t>(b.total));
        for (int i = 0; i < b.total; ++i)
            post[static_cast<std::size_t>(i)] = i;
        context_perm_targets(p->classical, d->classical,
                             [&] {
                                 // inverse of perm_classical
                                 std::vector<int> inv(d->perm_classical.size());
                                 for (std::size_t i = 0; i < d->perm_classical.size(); ++i)
                                     inv[static_cast<std::size_t>(d->perm_classical[i])] =
                                         static_cast<int>(i);
                                 return inv;
                             }(),
                             0, post);
        emit_wire_permutation(b.gates, post);
        return finalize(b, C, dq, a.out, a.garb);
    }
    case Rule::TMixedPerm: {
        LowLevelCircuit inner = compile(d->premises[0]);
        const DerivPtr &p = d->premises[0];
        int dq = context_size(d->quantum);
        Builder b;
        std::vector<int> D = b.alloc(dq);
        std::vector<int> preps = b.alloc(inner.prep);
        std::vector<int> pre(static_cast<std::size_t>(b.total));
        for (int i = 0; i < b.total; ++i)
            pre[static_cast<std::size_t>(i)] = i;
        context_perm_targets(d->quantum, p->quantum, d->perm_quantum, 0, pre);
        emit_wire_permutation(b.gates, pre);
        Placed a = b.place(inner, {}, D, preps);
        return finalize(b, {}, dq, a.out, a.garb);
    }
    case Rule::TCtrl:
        return compile_ctrl(d);
    case Rule::TGate: {
        LowLevelCircuit c;
        c.in_data = 1;
        c.out_data = 1;
        c.total = 1;
        c.gates.push_back(gate_u3(eval_real(d->prog->theta), eval_real(d->prog->phi),
                                  eval_real(d->prog->lam), 0));
        c.check_invariants();
        return c;
    }
    case Rule::TLeft:
        return inject_left(d->prog->t0, d->prog->t1);
    case Rule::TRight:
        return inject_right(d->prog->t0, d->prog->t1);
    case Rule::TPureAbs: {
        LowLevelCircuit padj = adjoint_circuit(compile(d->premises[0]));
        LowLevelCircuit body = compile(d->premises[1]);
        Builder b;
        std::vector<int> in = b.alloc(padj.in_data);
        std::vector<int> pp = b.alloc(padj.prep);
        std::vector<int> pb = b.alloc(body.prep);
        Placed a = b.place(padj, {}, in, pp);
        Placed bb = b.place(body, {}, a.out, pb);
        return finalize(b, {}, padj.in_data, bb.out, bb.garb);
    }
    case Rule::TRphase: {
        LowLevelCircuit pat = compile(d->premises[0]);
        PureErrorWrapped wrap = pure_error_wrap(adjoint_circuit(pat));
        double rm = eval_real(d->prog->r_match);
        double ro = eval_real(d->prog->r_ortho);
        Builder b;
        std::vector<int> in = b.alloc(wrap.circuit.in_data);
        std::vector<int> pw = b.alloc(wrap.circuit.prep);
        Placed w = b.place(wrap.circuit, {}, in, pw);
        b.gates.push_back(gate_phase(rm));
        if (ro != rm)
            b.gates.push_back(gate_controlled({{w.out[0], true}}, gate_phase(ro - rm)));
        Placed u = b.place(adjoint_circuit(wrap.circuit), {}, w.out, {});
        return finalize(b, {}, wrap.circuit.in_data, u.out, {});
    }
    case Rule::TMix:
    case Rule::TChannel:
        return compile(d->premises[0]);
    case Rule::TTry: {
        LowLevelCircuit w0 = cptp_wrap(compile(d->premises[0]));
        LowLevelCircuit w1 = cptp_wrap(compile(d->premises[1]));
        int st = type_size(d->type);
        Builder b;
        std::vector<int> in0 = b.alloc(w0.in_data);
        std::vector<int> in1 = b.alloc(w1.in_data);
        std::vector<int> p0 = b.alloc(w0.prep);
        std::vector<int> p1 = b.alloc(w1.prep);
        std::vector<int> ff = b.alloc(1);
        Placed a0 = b.place(w0, {}, in0, p0);
        Placed a1 = b.place(w1, {}, in1, p1);
        int ind0 = a0.out[0];
        int ind1 = a1.out[0];
        b.gates.push_back(
            gate_controlled({{ind0, true}, {ind1, true}}, gate_x(ff[0])));
        for (int i = 0; i < st; ++i)
            b.gates.push_back(gate_controlled(
                {{ind0, true}}, gate_swap(a0.out[static_cast<std::size_t>(1 + i)],
                                          a1.out[static_cast<std::size_t>(1 + i)])));
        std::vector<int> out = slice(a0.out, 1, st);
        std::vector<int> garb = {ind0, ind1};
        for (int i = 0; i < st; ++i)
            garb.push_back(a1.out[static_cast<std::size_t>(1 + i)]);
        garb.insert(garb.end(), a0.garb.begin(), a0.garb.end());
        garb.insert(garb.end(), a1.garb.begin(), a1.garb.end());
        return finalize(b, {}, w0.in_data + w1.in_data, out, garb);
    }
    case Rule::TMixedAbs: {
        LowLevelCircuit padj = adjoint_circuit(compile(d->premises[0]));
        LowLevelCircuit body = compile(d->premises[1]);
        const Context &pat_ctx = d->premises[0]->quantum;
        Context kept(pat_ctx.begin(), pat_ctx.begin() + d->n_kept);
        int keep_sz = context_size(kept);
        Builder b;
        std::vector<int> in = b.alloc(padj.in_data);
        std::vector<int> pp = b.alloc(padj.prep);
        std::vector<int> pb = b.alloc(body.prep);
        Placed a = b.place(padj, {}, in, pp);
        std::vector<int> keep_slots = slice(a.out, 0, keep_sz);
        std::vector<int> disc_slots =
            slice(a.out, keep_sz, static_cast<int>(a.out.size()) - keep_sz);
        Placed bb = b.place(body, {}, keep_slots, pb);
        std::vector<int> garb = disc_slots;
        garb.insert(garb.end(), bb.garb.begin(), bb.garb.end());
        return finalize(b, {}, padj.in_data, bb.out, garb);
    }
    default:
        throw InternalError("unhandled rule in compilation");
    }
}

namespace lower_detail {

inline LowLevelCircuit compile_ctrl(const DerivPtr &d) {
    std::size_t n = d->branch_ctx.size();
    const DerivPtr &d_scrut = d->premises[0];

    Context cls_shared(d->classical.begin(), d->classical.begin() + d->n_cls_shared);
    Context qud_shared(d->quantum.begin(), d->quantum.begin() + d->n_qud_shared);
    int gtot = context_size(d->classical);
    int dtot = context_size(d->quantum);
    int g = context_size(cls_shared);
    int dsz = context_size(qud_shared);
    int st = type_size(d->expr->scrutinee_type);
    int stp = type_size(d->expr->result_type);

    LowLevelCircuit se = purify(compile(d_scrut));
    LowLevelCircuit ortho_c = compile_ortho(d->ortho);
    int w = static_cast<int>(ortho_c.out_data) - st; // tag width

    std::vector<LowLevelCircuit> wj, bj, vj;
    int pool_w = 0, pool_b = 0;
    for (std::size_t j = 0; j < n; ++j) {
        LowLevelCircuit cj = compile(d->premises[1 + j]);
        PureErrorWrapped wrapped = pure_error_wrap(adjoint_circuit(cj));
        wj.push_back(wrapped.circuit);
        vj.push_back(adjoint_circuit(wrapped.circuit));
        pool_w = std::max(pool_w, wrapped.circuit.prep);
        LowLevelCircuit body = compile(d->premises[1 + n + j]);
        bj.push_back(body);
        pool_b = std::max(pool_b, body.prep);
    }

    Builder b;
    std::vector<int> C = b.alloc(gtot);
    std::vector<int> D = b.alloc(dtot);
    std::vector<int> Gc = b.alloc(g);
    std::vector<int> Dc = b.alloc(dsz);
    std::vector<int> pe = b.alloc(se.prep);
    std::vector<int> po = b.alloc(ortho_c.prep);
    std::vector<int> pw = b.alloc(pool_w);
    std::vector<int> pb = b.alloc(pool_b);

    // share the contexts used by the scrutinee
    for (int i = 0; i < g; ++i)
        b.gates.push_back(
            gate_cnot(C[static_cast<std::size_t>(i)], Gc[static_cast<std::size_t>(i)]));
    for (int i = 0; i < dsz; ++i)
        b.gates.push_back(
            gate_cnot(D[static_cast<std::size_t>(i)], Dc[static_cast<std::size_t>(i)]));

    // purified scrutinee: [Gc Dc] -> [T][G]
    Placed pse = b.place(se, {}, concat_slots(Gc, Dc), pe);
    std::vector<int> T = slice(pse.out, 0, st);
    std::vector<int> G =
        slice(pse.out, st, static_cast<int>(pse.out.size()) - st);

    // branch tagging
    Placed pso = b.place(ortho_c, {}, T, po);
    std::vector<int> TAG = slice(pso.out, 0, w);
    std::vector<int> T2 = slice(pso.out, w, st);

    if (n == 0) {
        // no branches: the fail flag is always raised; the output register is
        // a fresh block of zeros
        std::vector<int> out = b.alloc(stp);
        return finalize(b, C, dtot, out, {});
    }

    // tag-controlled branch adjoints: |v> -> [indicator][branch context][junk]
    std::vector<std::vector<int>> branch_payload(n);
    std::vector<std::vector<int>> w_out(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto ctrls = tag_controls(TAG, j);
        Placed pj = b.place(wj[j], {}, T2, slice(pw, 0, wj[j].prep), ctrls);
        w_out[j] = pj.out;
        branch_payload[j] =
            slice(pj.out, 1, context_size(d->branch_ctx[j]));
    }

    // tag-controlled branch bodies over the original quantum registers
    std::vector<int> out_tp;
    for (std::size_t j = 0; j < n; ++j) {
        auto ctrls = tag_controls(TAG, j);
        Placed pj = b.place(bj[j], concat_slots(C, branch_payload[j]), D,
                            slice(pb, 0, bj[j].prep), ctrls);
        if (j == 0)
            out_tp = pj.out;
    }

    // reverse pass: re-apply the branch patterns to recover the scrutinee value
    for (std::size_t j = 0; j < n; ++j) {
        auto ctrls = tag_controls(TAG, j);
        b.place(vj[j], {}, w_out[j], {}, ctrls);
    }

    // uncompute the tag, then the scrutinee, then unshare and erase
    LowLevelCircuit ortho_adj = adjoint_circuit(ortho_c);
    std::vector<int> pfail = b.alloc(ortho_adj.prep);
    Placed pu = b.place(ortho_adj, {}, concat_slots(TAG, T2), pfail);
    Placed pa = b.place(adjoint_circuit(se), {}, concat_slots(pu.out, G),
                        b.alloc(se.flag));
    std::vector<int> Grec = slice(pa.out, 0, g);
    std::vector<int> Drec = slice(pa.out, g, dsz);
    for (int i = 0; i < g; ++i)
        b.gates.push_back(
            gate_cnot(C[static_cast<std::size_t>(i)], Grec[static_cast<std::size_t>(i)]));

    std::vector<int> cur = out_tp;
    for (int i = 0; i < d->n_qud_shared; ++i) {
        const TypePtr &tx = d->quantum[static_cast<std::size_t>(i)].type;
        LowLevelCircuit ex = compile_erases(d->erases[static_cast<std::size_t>(i)], tx,
                                            d->expr->result_type);
        int off = context_offset(qud_shared, static_cast<std::size_t>(i));
        std::vector<int> xs = slice(Drec, off, type_size(tx));
        Placed px = b.place(ex, {}, concat_slots(xs, cur), {});
        cur = px.out;
    }

    return finalize(b, C, dtot, cur, {});
}

} // namespace lower_detail

} // namespace qunity
