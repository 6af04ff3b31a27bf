// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Criteria can also be run
// individually: acceptance <number>.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qunity/qunity.hpp"

#include "helpers.hpp"

using namespace qunity;
using qtest::program_path;
using qtest::read_file;

namespace {

// ---------------------------------------------------------------------------
// Corpus plumbing
// ---------------------------------------------------------------------------

struct CorpusEntry {
    std::string name;
    Expanded term;
    DerivPtr deriv; // most specific judgment
    bool pure = false;
};

CorpusEntry check_source(const std::string &name, const std::string &src) {
    CorpusEntry out;
    out.name = name;
    out.term = expand(parse(src));
    if (out.term.cat == Expanded::Cat::Expr) {
        try {
            out.deriv = infer_pure_expr({}, {}, out.term.expr);
            out.pure = true;
        } catch (const TypeError &) {
            out.deriv = infer_mixed_expr({}, out.term.expr);
        }
    } else {
        out.deriv = infer_prog(out.term.prog);
        out.pure = out.deriv->prog_type.coherent;
    }
    validate(out.deriv);
    return out;
}

CorpusEntry check_file(const std::string &file) {
    return check_source(file, read_file(program_path(file)));
}

std::string instantiate(const std::string &file, const std::string &main_def) {
    std::string src = read_file(program_path(file));
    return src.substr(0, src.rfind("def main")) + main_def;
}

std::string deutsch_source(const std::string &oracle) {
    return "def f := " + oracle + R"(
def main :=
  let x : Bit = had 0 in
  (ctrl f x : Bit {
     0 => x
   | 1 => x |> gphase[Bit, pi]
   } : Bit)
  |> had
)";
}

const char *kDeutschOracles[4] = {
    "lambda x : Bit -> 0",                                       // constant 0
    "lambda x : Bit -> 1",                                       // constant 1
    "lambda x : Bit -> x",                                       // identity
    "lambda x : Bit -> ctrl x : Bit { 0 => (x, 1) | 1 => (x, 0) } : Bit (x) Bit "
    "|> snd[Bit, Bit]",                                          // negation (measuring!)
};

// Every corpus judgment exercised by the semantic criteria (3, 5, 10, 11).
std::vector<CorpusEntry> semantic_corpus() {
    std::vector<CorpusEntry> out;
    for (const char *f : {"coin.qunity", "deutsch.qunity", "equals.qunity",
                          "deutsch_jozsa.qunity", "grover.qunity", "match.qunity",
                          "dsum.qunity"})
        out.push_back(check_file(f));
    for (int i = 0; i < 4; ++i)
        out.push_back(check_source("deutsch[" + std::to_string(i) + "]",
                                   deutsch_source(kDeutschOracles[i])));
    for (int n = 1; n <= 3; ++n)
        out.push_back(check_source("qft[" + std::to_string(n) + "]",
                                   instantiate("qft.qunity", "def main := qft[" +
                                                                 std::to_string(n) + "]")));
    for (const char *m : {"def main := tocoin", "def main := u", "def main := uprime",
                          "def main := downcast[0]", "def main := downcast[1]",
                          "def main := asleaf[1]", "def main := leftchild[1]",
                          "def main := nextcoin[0]", "def main := nextcoin[1]",
                          "def main := diffusion[1]", "def main := walk[1]"})
        out.push_back(check_source(m + 12, instantiate("walk.qunity", m)));
    return out;
}

CMat semantics_matrix(const CorpusEntry &e) {
    if (e.term.cat == Expanded::Cat::Expr)
        return pure_expr_sem(e.deriv, {});
    return pure_prog_sem(e.deriv);
}

Superop semantics_superop(const CorpusEntry &e) {
    if (e.term.cat == Expanded::Cat::Expr) {
        DerivPtr d = e.pure ? infer_mixed_expr({}, e.term.expr) : e.deriv;
        return mixed_expr_sem(d);
    }
    return mixed_prog_sem(e.pure ? infer_prog_channel(e.term.prog) : e.deriv);
}

TypePtr domain_of(const CorpusEntry &e) {
    return e.term.cat == Expanded::Cat::Expr ? unit_type() : e.deriv->prog_type.domain;
}

TypePtr codomain_of(const CorpusEntry &e) {
    return e.term.cat == Expanded::Cat::Expr ? e.deriv->type : e.deriv->prog_type.codomain;
}

void collect_ortho_certs(const DerivPtr &d, std::vector<OrthoPtr> &out) {
    if (d->ortho)
        out.push_back(d->ortho);
    for (const auto &p : d->premises)
        collect_ortho_certs(p, out);
}

// ---------------------------------------------------------------------------
// Criterion implementations
// ---------------------------------------------------------------------------

bool criterion_deutsch(std::ostream &os) {
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
        CorpusEntry e = check_source("deutsch", deutsch_source(kDeutschOracles[i]));
        DerivPtr d = e.pure ? infer_mixed_expr({}, e.term.expr) : e.deriv;
        CMat rho = mixed_expr_sem(d).apply(CMat::Ones(1, 1));
        bool balanced = i >= 2;
        CMat expect = CMat::Zero(2, 2);
        expect(balanced ? 1 : 0, balanced ? 1 : 0) = 1.0;
        double dev = (rho - expect).cwiseAbs().maxCoeff();
        os << "    oracle " << i << ": deviation " << dev << "\n";
        ok = ok && dev <= 1e-9;
    }
    return ok;
}

bool criterion_typing(std::ostream &os) {
    bool ok = true;
    auto expect = [&](const char *what, bool cond) {
        os << "    " << what << (cond ? ": ok" : ": FAILED") << "\n";
        ok = ok && cond;
    };
    CorpusEntry deutsch = check_file("deutsch.qunity");
    expect("deutsch : Bit, pure, empty contexts",
           deutsch.pure && type_equal(deutsch.deriv->type, bit_type()));
    CorpusEntry coin = check_file("coin.qunity");
    expect("coin : Bit, mixed", !coin.pure && type_equal(coin.deriv->type, bit_type()));
    {
        CorpusEntry diff = check_source("diffusion",
                                        instantiate("walk.qunity", "def main := diffusion[1]"));
        TypePtr coin_t = sum_type(unit_type(), bit_type());
        TypePtr v3 = sum_type(unit_type(),
                              prod_type(sum_type(unit_type(),
                                                 prod_type(sum_type(unit_type(),
                                                                    prod_type(void_type(),
                                                                              bit_type())),
                                                           bit_type())),
                                        bit_type()));
        TypePtr cv = prod_type(coin_t, v3);
        expect("diffusion[1] : Coin (x) Vertex[3] ~> Coin (x) Vertex[3], coherent",
               diff.pure && type_equal(diff.deriv->prog_type.domain, cv) &&
                   type_equal(diff.deriv->prog_type.codomain, cv));
    }
    expect("grover accepts", check_file("grover.qunity").pure);
    for (int n = 1; n <= 3; ++n) {
        CorpusEntry q = check_source(
            "qft", instantiate("qft.qunity", "def main := qft[" + std::to_string(n) + "]"));
        expect(("qft[" + std::to_string(n) + "] accepts").c_str(),
               q.pure && cardinality(q.deriv->prog_type.domain) == (1ull << n));
    }
    expect("match accepts", check_file("match.qunity").pure);
    expect("dsum accepts", check_file("dsum.qunity").pure);
    for (int n = 1; n <= 3; ++n) {
        CorpusEntry w = check_source(
            "walk", instantiate("walk.qunity", "def main := walk[" + std::to_string(n + 1) +
                                                   "] . diffusion[" + std::to_string(n) + "]"));
        expect(("walk step at n=" + std::to_string(n) + " accepts").c_str(), w.pure);
    }
    return ok;
}

bool criterion_compile(std::ostream &os) {
    bool ok = true;
    int verified = 0, skipped = 0;
    for (const CorpusEntry &e : semantic_corpus()) {
        DerivPtr d = e.pure ? e.deriv
                            : (e.term.cat == Expanded::Cat::Expr
                                   ? e.deriv
                                   : infer_prog_channel(e.term.prog));
        LowLevelCircuit c = compile(d);
        if (c.total > 22) {
            os << "    " << e.name << ": skipped (" << c.total << " qubits > 22-qubit cap)\n";
            ++skipped;
            continue;
        }
        double dev = 0;
        bool good;
        if (e.pure)
            good = verify_kraus(c, semantics_matrix(e), domain_of(e), codomain_of(e), 1e-6,
                                &dev);
        else
            good = verify_superop(c, semantics_superop(e), domain_of(e), codomain_of(e), 1e-6,
                                  &dev);
        os << "    " << e.name << ": " << c.total << " qubits, " << c.gates.size()
           << " gates, deviation " << dev << (good ? "" : "  FAILED") << "\n";
        ok = ok && good;
        ++verified;
    }
    // the coin circuit reproduces the reference layout exactly
    {
        CorpusEntry coin = check_file("coin.qunity");
        LowLevelCircuit c = compile(coin.deriv);
        bool layout = c.total == 2 && c.prep == 2 && c.flag == 0 && c.garb == 1 &&
                      c.gates.size() == 2 && c.gates[0].kind == Gate::Kind::U3 &&
                      std::abs(c.gates[0].theta - M_PI / 2) < 1e-12 &&
                      c.gates[1].kind == Gate::Kind::Controlled &&
                      c.gates[1].inner->kind == Gate::Kind::U3;
        os << "    coin layout {H, CNOT}, prep 2, flag 0, garbage 1: "
           << (layout ? "ok" : "FAILED") << "\n";
        ok = ok && layout;
    }
    os << "    verified " << verified << " circuits, skipped " << skipped
       << " beyond the cap\n";
    return ok && verified >= 15;
}

// classical corpus: negation via reversible pattern matching
const char *kPureNot =
    "(lambda z : Bit -> ctrl z : Bit { 0 => (z, 1) | 1 => (z, 0) } : Bit (x) Bit "
    "|> lambda (ctrl w : Bit { 1 => (0, w) | 0 => (1, w) } : Bit (x) Bit) "
    ": Bit (x) Bit -> w)";

std::vector<std::string> classical_program_sources() {
    std::vector<std::string> out = {
        "lambda x : Bit -> x",
        "lambda 0 : Bit -> 1",
        "lambda 1 : Bit -> 0",
        "lambda x : Bit -> (x, x)",
        "lambda (x, y) : Bit (x) Bit -> (y, x)",
        "left[Bit, Bit]",
        "right[Bit, Bit]",
        "left[Maybe[Bit]]",
        "just[Bit]",
        "fst[Bit, Bit]",
        "snd[Bit, Maybe[Bit]]",
        "lambda x : Bit -> 0",
        "lambda x : Maybe[Bit] -> (x, 1)",
        kPureNot,
        // controlled negation built from the pure matching negation
        std::string("lambda (x, y) : Bit (x) Bit -> ctrl x : Bit "
                    "{ 0 => (x, y) | 1 => (x, ") + kPureNot + " y) } : Bit (x) Bit",
        // a partial program: only the left branch is accepted
        "lambda left[Bit, Bit] z : Bit (+) Bit -> z",
        // measurement-flavored: share then discard
        "lambda x : Bit -> (x, x) |> snd[Bit, Bit]",
        // try/catch as a program
        "lambda x : Bit -> try (x |> lambda 0 : Bit -> 1) catch 0",
        "equals[Bit, 1]",
        "equals[Bit (x) Bit, (0, 1)]",
        "lambda x : Bit (x) Bit -> try just[Bit] ((lambda (1, y) : Bit (x) Bit -> y) x) "
        "catch nothing[Bit]",
    };
    return out;
}

std::vector<std::string> classical_expr_sources() {
    return {
        "(0, 1)",
        "try 0 catch 1",
        "try (0 |> lambda 0 : Bit -> 1) catch 0",
        "try (1 |> lambda 0 : Bit -> 1) catch 0",
        "ctrl 0 : Bit { 0 => 1 | 1 => 0 } : Bit",
        "let x : Bit = 1 in (x, (x, x))",
        "(lambda x : Bit -> (x, x)) 1 |> fst[Bit, Bit]",
        "nothing[Bit]",
        "just[Bit] 0",
        "try ((0, 1) |> lambda (1, y) : Bit (x) Bit -> y) catch 1",
    };
}

// checks the coincidence clauses for one pure expression judgment
bool coincide_pure_expr(const DerivPtr &d, std::ostream &os, const std::string &label) {
    CMat m = pure_expr_sem(d, {});
    std::uint64_t din = context_dimension(d->quantum);
    for (std::uint64_t i = 0; i < din; ++i) {
        Valuation tau = valuation_at(d->quantum, i);
        PartialResult r = classical_pure_eval(d, {}, tau);
        CVec col = m.col(static_cast<Eigen::Index>(i));
        CVec expect = CVec::Zero(col.size());
        if (r)
            expect(static_cast<Eigen::Index>(value_index(*r))) = 1.0;
        if ((col - expect).cwiseAbs().maxCoeff() > 1e-9) {
            os << "    MISMATCH (pure expr) in " << label << "\n";
            return false;
        }
    }
    return true;
}

bool coincide_mixed_expr(const DerivPtr &d, std::ostream &os, const std::string &label) {
    Superop s = mixed_expr_sem(d);
    std::uint64_t din = context_dimension(d->quantum);
    for (std::uint64_t i = 0; i < din; ++i) {
        Valuation tau = valuation_at(d->quantum, i);
        PartialResult r = classical_mixed_eval(d, tau);
        CMat rho = CMat::Zero(static_cast<Eigen::Index>(din), static_cast<Eigen::Index>(din));
        rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
        CMat out = s.apply(rho);
        CMat expect = CMat::Zero(out.rows(), out.cols());
        if (r) {
            auto k = static_cast<Eigen::Index>(value_index(*r));
            expect(k, k) = 1.0;
        }
        if ((out - expect).cwiseAbs().maxCoeff() > 1e-9) {
            os << "    MISMATCH (mixed expr) in " << label << "\n";
            return false;
        }
    }
    return true;
}

bool criterion_classical(std::ostream &os) {
    bool ok = true;
    int terms = 0;
    for (const std::string &src : classical_program_sources()) {
        Expanded e = expand(parse(src));
        if (!is_classical(e.prog)) {
            os << "    not classical: " << src << "\n";
            ok = false;
            continue;
        }
        DerivPtr d = infer_prog(e.prog);
        if (cardinality(d->prog_type.domain) > 16 || cardinality(d->prog_type.codomain) > 16)
            continue;
        ++terms;
        auto dom = values_of(d->prog_type.domain);
        if (d->prog_type.coherent) {
            // pure program clauses
            CMat m = pure_prog_sem(d);
            for (const auto &v : dom) {
                PartialResult r = classical_pure_prog_eval(d, v);
                CVec col = m.col(static_cast<Eigen::Index>(value_index(v)));
                CVec expect = CVec::Zero(col.size());
                if (r)
                    expect(static_cast<Eigen::Index>(value_index(*r))) = 1.0;
                if ((col - expect).cwiseAbs().maxCoeff() > 1e-9) {
                    os << "    MISMATCH (pure prog) in " << src << "\n";
                    ok = false;
                }
            }
        }
        {
            // mixed program clauses (coherent programs lift)
            DerivPtr dc = infer_prog_channel(e.prog);
            Superop s = mixed_prog_sem(dc);
            for (const auto &v : dom) {
                PartialResult r = classical_mixed_prog_eval(dc, v);
                CMat rho = CMat::Zero(s.dim_in, s.dim_in);
                auto i = static_cast<Eigen::Index>(value_index(v));
                rho(i, i) = 1.0;
                CMat out = s.apply(rho);
                CMat expect = CMat::Zero(out.rows(), out.cols());
                if (r) {
                    auto k = static_cast<Eigen::Index>(value_index(*r));
                    expect(k, k) = 1.0;
                }
                if ((out - expect).cwiseAbs().maxCoeff() > 1e-9) {
                    os << "    MISMATCH (mixed prog) in " << src << "\n";
                    ok = false;
                }
            }
        }
        // expression clauses on the abstraction bodies
        if (d->rule == Rule::TPureAbs) {
            ++terms;
            ok = coincide_pure_expr(d->premises[1], os, src) && ok;
            DerivPtr dm = infer_mixed_expr(d->premises[1]->quantum, e.prog->body);
            ok = coincide_mixed_expr(dm, os, src) && ok;
        } else if (d->rule == Rule::TMixedAbs) {
            ++terms;
            ok = coincide_mixed_expr(d->premises[1], os, src) && ok;
        }
    }
    for (const std::string &src : classical_expr_sources()) {
        Expanded e = expand(parse(src));
        ++terms;
        DerivPtr dm = infer_mixed_expr({}, e.expr);
        ok = coincide_mixed_expr(dm, os, src) && ok;
        try {
            DerivPtr dp = infer_pure_expr({}, {}, e.expr);
            ok = coincide_pure_expr(dp, os, src) && ok;
        } catch (const TypeError &) {
            // mixed-only expressions have no pure clause to test
        }
    }
    os << "    " << terms << " classical terms compared exhaustively\n";
    return ok && terms >= 30;
}

bool criterion_span_ortho(std::ostream &os) {
    bool ok = true;
    int certs = 0;
    for (const CorpusEntry &e : semantic_corpus()) {
        std::vector<OrthoPtr> collected;
        collect_ortho_certs(e.deriv, collected);
        for (const OrthoPtr &cert : collected) {
            ++certs;
            std::uint64_t dim = cardinality(cert->type);
            CMat sum_full = CMat::Zero(static_cast<Eigen::Index>(dim),
                                       static_cast<Eigen::Index>(dim));
            CMat sum_kept = sum_full;
            auto add = [&](const ExprPtr &pat, const Context &ctx, bool kept) {
                DerivPtr dp = infer_pure_expr({}, ctx, pat);
                CMat ej = pure_expr_sem(dp, {});
                sum_full += ej * ej.adjoint();
                if (kept) {
                    sum_kept += ej * ej.adjoint();
                    // basis amplitudes of kept patterns are 0 or 1
                    for (Eigen::Index r = 0; r < ej.rows(); ++r)
                        for (Eigen::Index c = 0; c < ej.cols(); ++c) {
                            double a = std::abs(ej(r, c));
                            double d01 = std::min(a, std::abs(a - 1.0));
                            if (d01 > 1e-9 || std::abs(ej(r, c).imag()) > 1e-9)
                                ok = false;
                        }
                }
            };
            for (std::size_t j = 0; j < cert->kept.size(); ++j)
                add(cert->kept[j], cert->kept_ctx[j], true);
            for (std::size_t j = 0; j < cert->dropped.size(); ++j)
                add(cert->dropped[j], cert->dropped_ctx[j], false);
            CMat eye = CMat::Identity(static_cast<Eigen::Index>(dim),
                                      static_cast<Eigen::Index>(dim));
            if ((sum_full - eye).cwiseAbs().maxCoeff() > 1e-9) {
                os << "    spanning identity FAILED in " << e.name << "\n";
                ok = false;
            }
            if (dim > 0) {
                Eigen::SelfAdjointEigenSolver<CMat> es(sum_kept);
                if (es.eigenvalues().maxCoeff() > 1.0 + 1e-9) {
                    os << "    ortho sub-identity FAILED in " << e.name << "\n";
                    ok = false;
                }
            }
        }
    }
    os << "    " << certs << " certificates checked\n";
    return ok && certs > 10;
}

bool criterion_well_defined(std::ostream &os) {
    Context ctx = {{"x", bit_type()}, {"y", bit_type()}};
    ExprPtr e = pair_expr(var_expr("x"), var_expr("y"));
    auto mix = std::make_shared<Derivation>();
    mix->rule = Rule::TMix;
    mix->kind = JudgmentKind::MixedExpr;
    mix->quantum = ctx;
    mix->expr = e;
    DerivPtr pure = infer_pure_expr({}, ctx, e);
    mix->type = pure->type;
    mix->premises = {pure};

    auto mk_mix = [&](const std::string &name) {
        auto m = std::make_shared<Derivation>();
        m->rule = Rule::TMix;
        m->kind = JudgmentKind::MixedExpr;
        m->quantum = {{name, bit_type()}};
        m->expr = var_expr(name);
        DerivPtr p = infer_pure_expr({}, {{name, bit_type()}}, var_expr(name));
        m->type = p->type;
        m->premises = {p};
        return DerivPtr(m);
    };
    auto mp = std::make_shared<Derivation>();
    mp->rule = Rule::TMixedPair;
    mp->kind = JudgmentKind::MixedExpr;
    mp->quantum = ctx;
    mp->expr = e;
    mp->type = prod_type(bit_type(), bit_type());
    mp->premises = {mk_mix("x"), mk_mix("y")};
    mp->n_first = 1;
    mp->n_second = 1;
    validate(DerivPtr(mix));
    validate(DerivPtr(mp));

    double dev = (mixed_expr_sem(DerivPtr(mix)).m - mixed_expr_sem(DerivPtr(mp)).m)
                     .cwiseAbs()
                     .maxCoeff();
    os << "    two proofs of the pair judgment differ by " << dev << "\n";
    return dev <= 1e-12;
}

std::string dsum_source(const std::string &f0, const std::string &f1) {
    return "def f0 := " + f0 + "\ndef f1 := " + f1 + R"(
def main := lambda x : Bit (+) Bit ->
    ctrl x : Bit (+) Bit {
      left[Bit, Bit] x0 => (x, left[Bit, Bit] (f0 x0))
    | right[Bit, Bit] x1 => (x, right[Bit, Bit] (f1 x1))
    } : (Bit (+) Bit) (x) (Bit (+) Bit)
    |> lambda (ctrl x' : Bit (+) Bit {
         left[Bit, Bit] x0' => (left[Bit, Bit] (dagger f0 x0'), x')
       | right[Bit, Bit] x1' => (right[Bit, Bit] (dagger f1 x1'), x')
       } : (Bit (+) Bit) (x) (Bit (+) Bit)) : (Bit (+) Bit) (x) (Bit (+) Bit) -> x'
)";
}

bool criterion_dsum(std::ostream &os) {
    std::mt19937 rng(20230111);
    // random angles as exact rational multiples of pi, which the real-constant
    // grammar can express
    std::uniform_int_distribution<int> frac(0, 19999);
    auto angle = [&] { return "2 * pi * " + std::to_string(frac(rng)) + " / 10000"; };
    auto u3src = [&] {
        std::string a = angle(), b = angle(), c = angle();
        return "u3(" + a + ", " + b + ", " + c + ")";
    };
    bool ok = true;
    for (int trial = 0; trial < 5; ++trial) {
        std::string s0 = u3src(), s1 = u3src();
        CorpusEntry e = check_source("dsum", dsum_source(s0, s1));
        CMat m = pure_prog_sem(e.deriv);
        CMat f0 = pure_prog_sem(infer_prog(expand(parse(s0)).prog));
        CMat f1 = pure_prog_sem(infer_prog(expand(parse(s1)).prog));
        double dev = (m - direct_sum(f0, f1)).cwiseAbs().maxCoeff();
        os << "    pair " << trial << ": deviation from block diagonal " << dev << "\n";
        ok = ok && dev <= 1e-9;
    }
    if (!ok) {
        os << "    NOTE: under the ctrl semantics the construction applies each operator\n"
              "    twice (once computing, once uncomputing), so the denotation has the\n"
              "    entrywise-SQUARED blocks; the law holds exactly for operators with\n"
              "    entries in {0,1} (the classical case), as checked below.\n";
        CorpusEntry cl =
            check_source("dsum-classical",
                         dsum_source("u3(pi, 0, pi)", "lambda x : Bit -> x"));
        CMat m = pure_prog_sem(cl.deriv);
        CMat x(2, 2), id = CMat::Identity(2, 2);
        x << 0, 1, 1, 0;
        double dev = (m - direct_sum(x, id)).cwiseAbs().maxCoeff();
        os << "    classical permutation pair: deviation " << dev
           << (dev <= 1e-9 ? " (passes)" : " (FAILS)") << "\n";
    }
    return ok;
}

CMat dft_matrix(int n) {
    Eigen::Index dim = 1ll << n;
    CMat m(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index k = 0; k < dim; ++k)
            m(j, k) = std::exp(Complex(0, 2 * M_PI * static_cast<double>(j * k) / dim)) /
                      std::sqrt(static_cast<double>(dim));
    return m;
}

CMat qubit_perm_matrix(const std::vector<int> &perm) {
    int n = static_cast<int>(perm.size());
    Eigen::Index dim = 1ll << n;
    CMat p = CMat::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::Index j = 0;
        for (int q = 0; q < n; ++q) {
            Eigen::Index bit = (i >> (n - 1 - perm[static_cast<std::size_t>(q)])) & 1;
            j |= bit << (n - 1 - q);
        }
        p(j, i) = 1.0;
    }
    return p;
}

CMat qft_semantics(int n) {
    std::string src =
        instantiate("qft.qunity", "def main := qft[" + std::to_string(n) + "]");
    return pure_prog_sem(check_source("qft", src).deriv);
}

bool criterion_qft(std::ostream &os) {
    bool ok = true;
    for (int n = 1; n <= 3; ++n) {
        CMat m = qft_semantics(n);
        double unit = (m.adjoint() * m - CMat::Identity(m.cols(), m.cols()))
                          .cwiseAbs()
                          .maxCoeff();
        os << "    qft[" << n << "] unitarity deviation " << unit << "\n";
        ok = ok && unit <= 1e-9;
    }
    // brute-force the qubit-index permutation at n = 2 (the relabeling acts
    // by conjugation), then re-verify the same permutation family at n = 3
    std::vector<int> found;
    {
        CMat m = qft_semantics(2);
        CMat d = dft_matrix(2);
        std::vector<int> perm = {0, 1};
        do {
            CMat p = qubit_perm_matrix(perm);
            if ((m - p * d * p.adjoint()).cwiseAbs().maxCoeff() <= 1e-9) {
                found = perm;
                break;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    if (found.empty()) {
        os << "    no qubit permutation matches at n = 2\n";
        return false;
    }
    bool reversal = found[0] == 1;
    os << "    found permutation at n = 2: " << (reversal ? "index reversal" : "identity")
       << "\n";
    {
        std::vector<int> perm3 = reversal ? std::vector<int>{2, 1, 0}
                                          : std::vector<int>{0, 1, 2};
        CMat m = qft_semantics(3);
        CMat p = qubit_perm_matrix(perm3);
        double dev = (m - p * dft_matrix(3) * p.adjoint()).cwiseAbs().maxCoeff();
        os << "    same permutation at n = 3: deviation " << dev << "\n";
        ok = ok && dev <= 1e-9;
    }
    return ok;
}

bool criterion_grover(std::ostream &os) {
    CorpusEntry e = check_file("grover.qunity");
    CMat psi = pure_expr_sem(e.deriv, {});
    // the marked item |101>
    std::uint64_t idx = 0b101;
    double p = std::norm(psi(static_cast<Eigen::Index>(idx), 0));
    double theta = std::asin(1.0 / std::sqrt(8.0));
    double closed_form = std::pow(std::sin(5 * theta), 2);
    os << "    success probability " << p << " (closed form " << closed_form << ")\n";
    return p >= 0.94 && std::abs(p - closed_form) <= 0.005;
}

bool criterion_iso(std::ostream &os) {
    bool ok = true;
    int accepted = 0;
    for (const CorpusEntry &e : semantic_corpus()) {
        IsoFlag flag = e.term.cat == Expanded::Cat::Expr ? check_iso(e.term.expr)
                                                         : check_iso(e.term.prog);
        if (!flag.iso)
            continue;
        ++accepted;
        if (e.pure) {
            CMat m = semantics_matrix(e);
            double dev =
                (m.adjoint() * m - CMat::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
            if (dev > 1e-9) {
                os << "    COUNTEREXAMPLE: " << e.name
                   << " is iso but not norm-preserving (deviation " << dev << ")\n";
                ok = false;
            }
        } else {
            Superop s = semantics_superop(e);
            Eigen::Index d = s.dim_in;
            CMat mixed = CMat::Identity(d, d) / static_cast<double>(d);
            double tr = std::abs(s.apply(mixed).trace().real() - 1.0);
            if (tr > 1e-9) {
                os << "    COUNTEREXAMPLE: " << e.name
                   << " is iso but not trace-preserving (deviation " << tr << ")\n";
                ok = false;
            }
        }
    }
    os << "    " << accepted << " corpus terms accepted by the iso judgment\n";
    return ok && accepted >= 8;
}

bool criterion_kraus(std::ostream &os) {
    bool ok = true;
    int pure_checked = 0, mixed_checked = 0;
    for (const CorpusEntry &e : semantic_corpus()) {
        if (e.pure) {
            if (!kraus_check(semantics_matrix(e), 1e-9)) {
                os << "    kraus bound FAILED for " << e.name << "\n";
                ok = false;
            }
            ++pure_checked;
        }
        Superop s = semantics_superop(e);
        for (Eigen::Index i = 0; i < s.dim_in; ++i) {
            CMat rho = CMat::Zero(s.dim_in, s.dim_in);
            rho(i, i) = 1.0;
            double tr = s.apply(rho).trace().real();
            if (tr > 1.0 + 1e-9 || tr < -1e-9) {
                os << "    trace bound FAILED for " << e.name << " (trace " << tr << ")\n";
                ok = false;
            }
        }
        ++mixed_checked;
    }
    os << "    " << pure_checked << " pure and " << mixed_checked
       << " mixed denotations within bounds\n";
    return ok;
}

struct Criterion {
    int id;
    const char *label;
    std::function<bool(std::ostream &)> run;
};

const std::vector<Criterion> &criteria() {
    static const std::vector<Criterion> cs = {
        {1, "deutsch oracles produce |0><0| / |1><1|", criterion_deutsch},
        {2, "typing regressions", criterion_typing},
        {3, "compilation verifies against the semantics", criterion_compile},
        {4, "classical/quantum coincidence", criterion_classical},
        {5, "spanning and orthogonality semantics", criterion_span_ortho},
        {6, "well-definedness of the semantics", criterion_well_defined},
        {7, "direct-sum program law", criterion_dsum},
        {8, "qft matches the reference transform", criterion_qft},
        {9, "grover success probability", criterion_grover},
        {10, "iso terms preserve norm and trace", criterion_iso},
        {11, "kraus and trace bounds", criterion_kraus},
    };
    return cs;
}

} // namespace

int main(int argc, char **argv) {
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failures = 0;
    for (const Criterion &c : criteria()) {
        if (only && c.id != only)
            continue;
        std::ostringstream detail;
        bool ok = false;
        auto t0 = std::chrono::steady_clock::now();
        try {
            ok = c.run(detail);
        } catch (const std::exception &e) {
            detail << "    exception: " << e.what() << "\n";
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::cout << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << " - " << c.label
                  << " (" << ms << " ms)\n"
                  << detail.str();
        if (!ok)
            ++failures;
    }
    if (failures)
        std::cout << failures << " criterion(s) failed\n";
    return failures ? 1 : 0;
}
