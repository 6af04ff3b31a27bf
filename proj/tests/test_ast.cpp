#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "qunity/ast.hpp"
#include "qunity/print.hpp"

using namespace qunity;

namespace {

TypePtr maybe_bit() { return sum_type(unit_type(), bit_type()); }

TypePtr random_type(std::mt19937 &rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 3 : 1);
    switch (pick(rng)) {
    case 0: return unit_type();
    case 1: return rng() % 4 == 0 ? void_type() : unit_type();
    case 2: return sum_type(random_type(rng, depth - 1), random_type(rng, depth - 1));
    default: return prod_type(random_type(rng, depth - 1), random_type(rng, depth - 1));
    }
}

} // namespace

TEST_CASE("cardinality and size") {
    CHECK(cardinality(void_type()) == 0);
    CHECK(cardinality(unit_type()) == 1);
    CHECK(cardinality(bit_type()) == 2);
    CHECK(cardinality(prod_type(bit_type(), bit_type())) == 4);
    CHECK(type_size(void_type()) == 0);
    CHECK(type_size(unit_type()) == 0);
    CHECK(type_size(bit_type()) == 1);
    CHECK(type_size(maybe_bit()) == 2);
}

TEST_CASE("canonical value enumeration") {
    CHECK(values_of(void_type()).empty());

    auto bits = values_of(bit_type());
    REQUIRE(bits.size() == 2);
    CHECK(bits[0]->kind == Value::Kind::Left);
    CHECK(bits[1]->kind == Value::Kind::Right);

    auto pairs = values_of(prod_type(bit_type(), bit_type()));
    REQUIRE(pairs.size() == 4);
    // lexicographic with the first component outermost
    CHECK(encode(pairs[0]) == "00");
    CHECK(encode(pairs[1]) == "01");
    CHECK(encode(pairs[2]) == "10");
    CHECK(encode(pairs[3]) == "11");
}

TEST_CASE("encode") {
    CHECK(encode(unit_value()).empty());
    auto bits = values_of(bit_type());
    CHECK(encode(bits[0]) == "0");
    CHECK(encode(bits[1]) == "1");
    // Maybe(Bit): the left injection pads with a trailing zero
    auto mb = values_of(maybe_bit());
    REQUIRE(mb.size() == 3);
    CHECK(encode(mb[0]) == "00");
    CHECK(encode(mb[1]) == "10");
    CHECK(encode(mb[2]) == "11");
}

TEST_CASE("value indexing is the enumeration order") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        TypePtr t = random_type(rng, 3);
        auto vals = values_of(t);
        CHECK(vals.size() == cardinality(t));
        CHECK((1ull << type_size(t)) >= cardinality(t));
        std::set<std::string> encodings;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            CHECK(value_index(vals[i]) == i);
            CHECK(value_equal(value_at(t, i), vals[i]));
            CHECK(value_inhabits(vals[i], t));
            std::string bits = encode(vals[i]);
            CHECK(bits.size() == static_cast<std::size_t>(type_size(t)));
            CHECK(encodings.insert(bits).second); // all encodings distinct
        }
    }
}

TEST_CASE("free variables") {
    ExprPtr x = var_expr("x");
    CHECK(free_vars(pair_expr(x, x)) == std::set<std::string>{"x"});
    CHECK(free_vars(unit_expr()).empty());
    // ctrl x { 0 -> y | 1 -> z } mentions x, y, z (plus nothing else)
    auto zero = app_expr(left_prog(unit_type(), unit_type()), unit_expr());
    auto one = app_expr(right_prog(unit_type(), unit_type()), unit_expr());
    auto c = ctrl_expr(x, bit_type(),
                       {CtrlBranch{zero, var_expr("y")}, CtrlBranch{one, var_expr("z")}},
                       bit_type());
    CHECK(free_vars(c) == std::set<std::string>({"x", "y", "z"}));
}

TEST_CASE("valuation indexing") {
    Context ctx = {{"a", bit_type()}, {"b", maybe_bit()}};
    CHECK(context_dimension(ctx) == 6);
    CHECK(context_size(ctx) == 3);
    for (std::uint64_t i = 0; i < 6; ++i)
        CHECK(valuation_index(ctx, valuation_at(ctx, i)) == i);
}
