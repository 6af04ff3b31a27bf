#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace qunity;
using qtest::expr_of;
using qtest::prog_of;

namespace {

CMat had_matrix() {
    CMat h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

} // namespace

TEST_CASE("sharing maps |+> to the Bell state") {
    DerivPtr d = infer_pure_expr({}, {{"x", bit_type()}}, expr_of("(x, x)"));
    CMat e = pure_expr_sem(d, {});
    CVec plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    CVec out = e * plus;
    CVec bell(4);
    bell << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
    CHECK((out - bell).cwiseAbs().maxCoeff() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("unit denotes the 1x1 identity") {
    DerivPtr d = infer_pure_expr({{"y", bit_type()}}, {}, unit_expr());
    CMat e = pure_expr_sem(d, valuation_at({{"y", bit_type()}}, 0));
    REQUIRE(e.rows() == 1);
    REQUIRE(e.cols() == 1);
    CHECK(e(0, 0) == Complex(1, 0));
}

TEST_CASE("program semantics") {
    // had |0> = |+>
    CMat h = pure_prog_sem(infer_prog(prog_of("had")));
    CHECK((h - had_matrix()).cwiseAbs().maxCoeff() == Catch::Approx(0.0).margin(1e-12));

    // gphase(pi) = -I on any type
    CMat g = pure_prog_sem(infer_prog(prog_of("gphase[Bit (x) Bit, pi]")));
    CHECK((g + CMat::Identity(4, 4)).cwiseAbs().maxCoeff() ==
          Catch::Approx(0.0).margin(1e-12));

    // lambda 0 : Bit -> 1 is the projector-like |1><0|
    CMat p = pure_prog_sem(infer_prog(prog_of("lambda 0 : Bit -> 1")));
    CMat expect = CMat::Zero(2, 2);
    expect(1, 0) = 1.0;
    CHECK((p - expect).cwiseAbs().maxCoeff() == Catch::Approx(0.0).margin(1e-12));
    CHECK(kraus_check(p));

    // left / right are injections
    CMat l = pure_prog_sem(infer_prog(prog_of("left[Bit, Bit]")));
    REQUIRE(l.rows() == 4);
    REQUIRE(l.cols() == 2);
    CHECK(l(0, 0) == Complex(1, 0));
    CHECK(l(1, 1) == Complex(1, 0));
    CHECK(l(2, 0) == Complex(0, 0));
}

TEST_CASE("deutsch ctrl block with the identity oracle") {
    // ctrl (f x) { 0 => x | 1 => x gphase(pi) } with f = identity behaves as Z
    ExprPtr e = expr_of(
        "ctrl ((lambda y : Bit -> y) x) : Bit { 0 => x | 1 => x |> gphase[Bit, pi] } : Bit");
    DerivPtr d = infer_pure_expr({}, {{"x", bit_type()}}, e);
    CMat m = pure_expr_sem(d, {});
    CMat z(2, 2);
    z << 1, 0, 0, -1;
    CHECK((m - z).cwiseAbs().maxCoeff() == Catch::Approx(0.0).margin(1e-12));

    // on |+> the result is |->
    CVec plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    CVec out = m * plus;
    CVec minus(2);
    minus << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
    CHECK((out - minus).cwiseAbs().maxCoeff() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("coin flip densities") {
    // coin = meas(had 0) has output density diag(1/2, 1/2)
    ExprPtr coin = expr_of("had 0 |> (lambda x : Bit -> (x, x)) |> fst[Bit, Bit]");
    DerivPtr d = infer_mixed_expr({}, coin);
    Superop s = mixed_expr_sem(d);
    CMat rho = s.apply(CMat::Ones(1, 1));
    CHECK(rho(0, 0).real() == Catch::Approx(0.5));
    CHECK(rho(1, 1).real() == Catch::Approx(0.5));
    CHECK(std::abs(rho(0, 1)) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("mix rule lifts a pure derivation to conjugation") {
    DerivPtr d = infer_mixed_expr({{"x", bit_type()}}, var_expr("x"));
    REQUIRE(d->rule == Rule::TMix);
    Superop s = mixed_expr_sem(d);
    CMat rho(2, 2);
    rho << 0.25, 0.1, 0.1, 0.75;
    CHECK((s.apply(rho) - rho).cwiseAbs().maxCoeff() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("try/catch semantics") {
    // try (0 |> lambda 0 : Bit -> 1) catch 0: the try succeeds with probability 1
    DerivPtr d = infer_mixed_expr({}, expr_of("try (0 |> lambda 0 : Bit -> 1) catch 0"));
    Superop s = mixed_expr_sem(d);
    CMat rho = s.apply(CMat::Ones(1, 1));
    CHECK(rho(1, 1).real() == Catch::Approx(1.0));
    CHECK(rho(0, 0).real() == Catch::Approx(0.0).margin(1e-12));

    // try (1 |> lambda 0 : Bit -> 1) catch 0: the try fails, catch yields 0
    DerivPtr d2 = infer_mixed_expr({}, expr_of("try (1 |> lambda 0 : Bit -> 1) catch 0"));
    CMat rho2 = mixed_expr_sem(d2).apply(CMat::Ones(1, 1));
    CHECK(rho2(0, 0).real() == Catch::Approx(1.0));
}

TEST_CASE("discarding abstraction as a channel") {
    // lambda x : Bit -> 0 maps every density to tr(rho) |0><0|
    DerivPtr d = infer_prog(prog_of("lambda x : Bit -> 0"));
    Superop s = mixed_prog_sem(d);
    CMat rho(2, 2);
    rho << 0.3, 0.2, 0.2, 0.7;
    CMat out = s.apply(rho);
    CHECK(out(0, 0).real() == Catch::Approx(1.0));
    CHECK(std::abs(out(1, 1)) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("channel lift of had") {
    DerivPtr d = infer_prog_channel(prog_of("had"));
    Superop s = mixed_prog_sem(d);
    CMat rho = CMat::Zero(2, 2);
    rho(0, 0) = 1.0;
    CMat out = s.apply(rho);
    CHECK(out(0, 1).real() == Catch::Approx(0.5));
    CHECK(out(1, 0).real() == Catch::Approx(0.5));
}

TEST_CASE("derivation independence on the two pair proofs") {
    // the two derivations of x : Bit, y : Bit ||- (x, y) : Bit (x) Bit
    Context ctx = {{"x", bit_type()}, {"y", bit_type()}};
    ExprPtr e = pair_expr(var_expr("x"), var_expr("y"));

    // proof 1: T-Mix over T-PurePair
    auto mix = std::make_shared<Derivation>();
    mix->rule = Rule::TMix;
    mix->kind = JudgmentKind::MixedExpr;
    mix->quantum = ctx;
    mix->expr = e;
    DerivPtr pure = infer_pure_expr({}, ctx, e);
    mix->type = pure->type;
    mix->premises = {pure};
    validate(DerivPtr(mix));

    // proof 2: T-MixedPair over two T-Mix
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
    mp->n_shared = 0;
    mp->n_first = 1;
    mp->n_second = 1;
    validate(DerivPtr(mp));

    Superop s1 = mixed_expr_sem(DerivPtr(mix));
    Superop s2 = mixed_expr_sem(DerivPtr(mp));
    CHECK((s1.m - s2.m).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("kraus property of pure denotations") {
    for (const char *src : {"(x, x)", "had x", "ctrl x : Bit { 0 => x | 1 => x } : Bit"}) {
        DerivPtr d = infer_pure_expr({}, {{"x", bit_type()}}, expr_of(src));
        CHECK(kraus_check(pure_expr_sem(d, {})));
    }
}
