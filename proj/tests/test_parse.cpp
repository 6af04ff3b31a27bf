#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace qunity;
using qtest::expand_src;
using qtest::expr_of;
using qtest::prog_of;
using qtest::type_of_src;

TEST_CASE("sugar expansion basics") {
    // had == u3(pi/2, 0, pi)
    ProgPtr had = prog_of("had");
    REQUIRE(had->kind == Prog::Kind::U3);
    CHECK(eval_real(had->theta) == Catch::Approx(M_PI / 2));
    CHECK(eval_real(had->phi) == Catch::Approx(0.0));
    CHECK(eval_real(had->lam) == Catch::Approx(M_PI));

    // had 0 is an application of had to left[(), ()] ()
    ExprPtr e = expr_of("had 0");
    REQUIRE(e->kind == Expr::Kind::App);
    CHECK(e->prog->kind == Prog::Kind::U3);
    CHECK(e->arg->kind == Expr::Kind::App);
    CHECK(e->arg->prog->kind == Prog::Kind::Left);

    // lambda
    ProgPtr f = prog_of("lambda x : Bit -> (x, x)");
    REQUIRE(f->kind == Prog::Kind::Abs);
    CHECK(f->pattern->kind == Expr::Kind::Var);
    CHECK(type_equal(f->domain, bit_type()));
    CHECK(f->body->kind == Expr::Kind::Pair);
}

TEST_CASE("let desugars to application of a lambda") {
    ExprPtr e = expr_of("let x : Bit = had 0 in (x, x)");
    REQUIRE(e->kind == Expr::Kind::App);
    REQUIRE(e->prog->kind == Prog::Kind::Abs);
    CHECK(e->prog->pattern->kind == Expr::Kind::Var);
    CHECK(e->arg->kind == Expr::Kind::App);
}

TEST_CASE("tensor powers") {
    // Bit^0 == (), Bit^2 == Bit (x) (Bit (x) ())
    CHECK(type_equal(type_of_src("Bit^0"), unit_type()));
    TypePtr b2 = type_of_src("Bit^2");
    REQUIRE(b2->kind == DataType::Kind::Prod);
    CHECK(type_equal(b2->left, bit_type()));
    CHECK(type_equal(b2->right, prod_type(bit_type(), unit_type())));
    CHECK(cardinality(type_of_src("Bit^3")) == 8);
    CHECK(type_size(type_of_src("Bit^3")) == 3);

    ExprPtr p3 = expr_of("plus^2");
    REQUIRE(p3->kind == Expr::Kind::Pair);
    CHECK(p3->first->kind == Expr::Kind::App);
}

TEST_CASE("maybe, nothing, just, gphase, reflect, equals, fst") {
    CHECK(type_equal(type_of_src("Maybe[Bit]"), sum_type(unit_type(), bit_type())));
    ExprPtr n = expr_of("nothing[Bit]");
    REQUIRE(n->kind == Expr::Kind::App);
    CHECK(n->prog->kind == Prog::Kind::Left);
    ProgPtr j = prog_of("just[Bit]");
    CHECK(j->kind == Prog::Kind::Right);

    ProgPtr g = prog_of("gphase[Bit, pi]");
    REQUIRE(g->kind == Prog::Kind::Rphase);
    CHECK(g->pattern->kind == Expr::Kind::Var);
    CHECK(real_equal(g->r_match, g->r_ortho));

    ProgPtr r = prog_of("reflect[Bit, had 0]");
    REQUIRE(r->kind == Prog::Kind::Rphase);
    CHECK(eval_real(r->r_match) == Catch::Approx(0.0));
    CHECK(eval_real(r->r_ortho) == Catch::Approx(M_PI));

    ProgPtr q = prog_of("equals[Bit, 1]");
    REQUIRE(q->kind == Prog::Kind::Abs);
    CHECK(q->body->kind == Expr::Kind::TryCatch);

    ProgPtr fst = prog_of("fst[Bit, Bit]");
    REQUIRE(fst->kind == Prog::Kind::Abs);
    CHECK(fst->pattern->kind == Expr::Kind::Pair);
    CHECK(fst->body->kind == Expr::Kind::Var);
}

TEST_CASE("dagger builds the inverse abstraction") {
    ProgPtr d = prog_of("dagger had");
    REQUIRE(d->kind == Prog::Kind::Abs);
    REQUIRE(d->pattern->kind == Expr::Kind::App);
    CHECK(d->pattern->prog->kind == Prog::Kind::U3);
    CHECK(type_equal(d->domain, bit_type()));
    CHECK(d->body->kind == Expr::Kind::Var);
}

TEST_CASE("parameterized definitions with recursion on 0 / n+1") {
    std::string src = R"(
        def reps[0] := ()
        def reps[n+1] := (1, reps[n])
        def main := reps[3]
    )";
    ExprPtr e = expr_of(src);
    int len = 0;
    while (e->kind == Expr::Kind::Pair) {
        ++len;
        e = e->second;
    }
    CHECK(len == 3);
    CHECK(e->kind == Expr::Kind::Unit);
}

TEST_CASE("non-decreasing recursion is rejected") {
    std::string src = R"(
        def bad[n] := bad[n + 1]
        def main := bad[0]
    )";
    CHECK_THROWS_AS(expand_src(src), ExpandError);
}

TEST_CASE("unknown definitions and syntax errors") {
    CHECK_THROWS_AS(expand_src("unknowndef[3]"), ExpandError);
    CHECK_THROWS_AS(parse("(had 0"), ParseError);
    try {
        parse("def x :=\n  (a,");
        FAIL("expected a parse error");
    } catch (const ParseError &e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("printing an expanded term re-parses to the same term") {
    auto roundtrip_expr = [](const std::string &src) {
        ExprPtr e = expr_of(src);
        ExprPtr e2 = expr_of(print_expr(e));
        CHECK(expr_equal(e, e2));
    };
    roundtrip_expr("had 0");
    roundtrip_expr("(had 0, try 0 catch 1)");
    roundtrip_expr("let x : Bit = had 0 in "
                   "ctrl x : Bit { 0 => (x, 0) | 1 => (x, 1) } : Bit (x) Bit");
    roundtrip_expr("plus^3");

    auto roundtrip_prog = [](const std::string &src) {
        ProgPtr p = prog_of(src);
        ProgPtr p2 = prog_of(print_prog(p));
        CHECK(prog_equal(p, p2));
    };
    roundtrip_prog("had");
    roundtrip_prog("dagger (lambda x : Bit -> ctrl x : Bit { 0 => (x, 1) | 1 => (x, 0) } "
                   ": Bit (x) Bit)");
    roundtrip_prog("rphase[Bit, had 0, pi / 2, -pi]");
    roundtrip_prog("equals[Bit^2, (0, (1, ()))]");
}

TEST_CASE("expansion is idempotent on the embedded term") {
    std::string src = "def main := had 0 |> (lambda x : Bit -> (x, x)) |> fst[Bit, Bit]";
    ExprPtr once = expr_of(src);
    ExprPtr twice = expr_of(print_expr(once));
    CHECK(expr_equal(once, twice));
}

TEST_CASE("comments and pipeline parsing") {
    ExprPtr e = expr_of("// a comment\nhad 0 |> had // trailing\n");
    REQUIRE(e->kind == Expr::Kind::App);
    CHECK(e->prog->kind == Prog::Kind::U3);
}
