#include <catch2/catch_amalgamated.hpp>

#include "qunity/matrix.hpp"

using namespace qunity;

TEST_CASE("tensor product") {
    CMat i2 = CMat::Identity(2, 2);
    CHECK((tensor(i2, i2) - CMat::Identity(4, 4)).norm() == Catch::Approx(0.0));
    CMat a(1, 2);
    a << 1.0, 2.0;
    CMat b(2, 1);
    b << 3.0, 4.0;
    CMat k = tensor(a, b);
    REQUIRE(k.rows() == 2);
    REQUIRE(k.cols() == 2);
    CHECK(k(0, 0) == Complex(3.0, 0));
    CHECK(k(1, 1) == Complex(8.0, 0));
}

TEST_CASE("direct sum is block-diagonal embedding") {
    CMat a(2, 2);
    a << 1, 2, 3, 4;
    CMat b(1, 1);
    b << 5;
    CMat s = direct_sum(a, b);
    REQUIRE(s.rows() == 3);
    REQUIRE(s.cols() == 3);
    CHECK(s(0, 1) == Complex(2, 0));
    CHECK(s(2, 2) == Complex(5, 0));
    CHECK(s(0, 2) == Complex(0, 0));
    CHECK(s(2, 0) == Complex(0, 0));
}

TEST_CASE("partial trace of a Bell state") {
    CVec bell(4);
    bell << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
    CMat rho = bell * bell.adjoint();
    CMat reduced = partial_trace(rho, 2, 2);
    CHECK((reduced - 0.5 * CMat::Identity(2, 2)).cwiseAbs().maxCoeff() ==
          Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("kraus check") {
    CMat had(2, 2);
    had << 1, 1, 1, -1;
    had /= std::sqrt(2.0);
    CHECK(kraus_check(had));

    CMat proj = CMat::Zero(2, 2);
    proj(1, 0) = 1.0; // |1><0|
    CHECK(kraus_check(proj));

    CHECK_FALSE(kraus_check(2.0 * CMat::Identity(2, 2)));
}

TEST_CASE("superoperator application") {
    CMat x(2, 2);
    x << 0, 1, 1, 0;
    Superop s = conjugation_superop(x);
    CMat rho = CMat::Zero(2, 2);
    rho(0, 0) = 1.0;
    CMat out = superop_apply(s, rho);
    CHECK(out(1, 1) == Complex(1, 0));
    CHECK(out(0, 0) == Complex(0, 0));
}

TEST_CASE("vectorization round trip") {
    CMat m(2, 2);
    m << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
    CHECK((unvec_rm(vec_rm(m), 2) - m).norm() == Catch::Approx(0.0));
}

TEST_CASE("density matrix predicates") {
    CMat rho = CMat::Zero(2, 2);
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.5;
    CHECK(is_density_matrix(rho));
    CMat bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_FALSE(is_hermitian(bad));
}
