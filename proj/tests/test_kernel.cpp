#include <doctest.h>

#include "rational_oracle.hpp"
#include "snf/fixtures.hpp"
#include "snf/kernel.hpp"
#include "test_helpers.hpp"

using namespace snf;

TEST_CASE("kernel: determinant basics") {
    CHECK(det_exact(IntMat::identity(5)) == 1);
    CHECK(det_exact(IntMat::from_rows({{3}})) == 3);
    CHECK(det_exact(IntMat::from_rows({{2, 0, 0}, {5, -3, 0}, {7, 1, 4}})) == -24);
    CHECK(det_exact(IntMat::from_rows({{0, 1}, {1, 0}})) == -1); // row swap flips sign
    CHECK(det_exact(IntMat::from_rows({{2, 4}, {1, 2}})) == 0);
    CHECK(det_exact(IntMat::zero(3, 3)) == 0);
    CHECK_THROWS_AS(det_exact(IntMat::zero(2, 3)), dimension_error);
}

TEST_CASE("kernel: determinants of the fixture matrices") {
    CHECK(abs(det_exact(fixtures::a4())) == fixtures::a4_smith().det());
    CHECK(fixtures::a4_smith().det() == 261792);
    CHECK(abs(det_exact(fixtures::a7())) == fixtures::a7_smith().det());
    CHECK(fixtures::a7_smith().det() == 1280);
    CHECK(abs(det_exact(fixtures::l4())) == Int("2921001691086297"));
    // linearization preserves the determinant
    CHECK(det_exact(fixtures::l4_linearized()) == det_exact(fixtures::l4()));
}

TEST_CASE("kernel: determinant is multiplicative") {
    Rng rng(201);
    for (int t = 0; t < 10; ++t) {
        const int n = 1 + static_cast<int>(rng.below(5));
        const IntMat a = testing::random_matrix(n, n, -30, 30, rng);
        const IntMat b = testing::random_matrix(n, n, -30, 30, rng);
        CHECK(det_exact(matmul(a, b)) == det_exact(a) * det_exact(b));
    }
}

static void check_hermite_shape(const IntMat& h) {
    REQUIRE(h.rows() == h.cols());
    const int n = h.rows();
    for (int i = 0; i < n; ++i) {
        CHECK(h.at(i, i) > 0);
        for (int j = i + 1; j < n; ++j) CHECK(h.at(i, j) == 0); // lower triangular
        for (int j = 0; j < i; ++j) {
            CHECK(h.at(i, j) >= 0);
            CHECK(h.at(i, j) < h.at(j, j)); // reduced by the column's diagonal
        }
    }
}

TEST_CASE("kernel: hermite form fixtures") {
    CHECK(hermite_lower(IntMat::identity(4)) == IntMat::identity(4));
    CHECK(hermite_lower(fixtures::l4_linearized()) == fixtures::l4_hermite_of_linearized());

    // the perturbed fixture collapses to a trivial form: h1, a dense first
    // column, identity elsewhere
    MatBuf h7 = IntMat::identity(7).thaw();
    h7.at(0, 0) = fixtures::run7_h1();
    const IntVec hbar = fixtures::run7_hbar();
    for (int i = 1; i < 7; ++i) h7.at(i, 0) = hbar[i - 1];
    CHECK(hermite_lower(fixtures::run7_b()) == h7.freeze());
}

TEST_CASE("kernel: hermite form properties on random input") {
    Rng rng(202);
    for (int t = 0; t < 25; ++t) {
        const int n = 1 + static_cast<int>(rng.below(6));
        const IntMat a = testing::random_nonsingular(n, -60, 60, rng);
        const IntMat h = hermite_lower(a);
        check_hermite_shape(h);
        CHECK(abs(det_exact(h)) == abs(det_exact(a)));
        // H = T A for a unimodular T: T = H A^{-1} must be integral with det +-1
        const auto ainv = oracle::inverse(a);
        REQUIRE(ainv.has_value());
        const auto trat = oracle::mul(h, *ainv);
        REQUIRE(oracle::is_integral(trat));
        CHECK(abs(det_exact(oracle::to_integer(trat))) == 1);
    }
}

TEST_CASE("kernel: hermite form is invariant under unimodular row operations") {
    Rng rng(203);
    for (int t = 0; t < 10; ++t) {
        const int n = 2 + static_cast<int>(rng.below(4));
        const IntMat a = testing::random_nonsingular(n, -40, 40, rng);
        // restrict to row operations so U A stays left-equivalent to A
        MatBuf ub = IntMat::identity(n).thaw();
        for (int k = 0; k < 12; ++k) {
            const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            if (i == j) continue;
            const Int c(static_cast<long>(rng.below(9)) - 4);
            for (int col = 0; col < n; ++col) ub.at(i, col) += c * ub.at(j, col);
        }
        const IntMat u = ub.freeze();
        REQUIRE(abs(det_exact(u)) == 1);
        CHECK(hermite_lower(matmul(u, a)) == hermite_lower(a));
    }
}

TEST_CASE("kernel: hermite form error paths") {
    CHECK_THROWS_AS(hermite_lower(IntMat::from_rows({{1, 2}, {2, 4}})), singular_error);
    CHECK_THROWS_AS(hermite_lower(IntMat::zero(2, 3)), dimension_error);
}

static void check_smith_triple(const IntMat& a, const SmithTriple& t) {
    REQUIRE(t.S.n() == a.rows());
    CHECK(t.S.valid_chain());
    CHECK(matmul(matmul(t.U0, a), t.V0) == IntMat::diagonal(t.S.diag));
    CHECK(abs(det_exact(t.U0)) == 1);
    CHECK(abs(det_exact(t.V0)) == 1);
    CHECK(matmul(t.V0, t.V0inv) == IntMat::identity(a.rows()));
    CHECK(t.S.det() == abs(det_exact(a)));
}

TEST_CASE("kernel: smith form fixtures") {
    CHECK(smith_classical(IntMat::identity(3)).S == SmithForm({Int(1), Int(1), Int(1)}));
    CHECK(smith_classical(fixtures::a4()).S == fixtures::a4_smith());
    CHECK(smith_classical(fixtures::a7()).S == fixtures::a7_smith());
    CHECK(smith_classical(scale(fixtures::a7(), Int(2))).S == fixtures::a7_two_smith());
    CHECK(smith_classical(fixtures::l4()).S ==
          SmithForm({Int(1), Int(3), Int(3), Int("324555743454033")}));
    check_smith_triple(fixtures::a4(), smith_classical(fixtures::a4()));
    check_smith_triple(fixtures::a7(), smith_classical(fixtures::a7()));
}

TEST_CASE("kernel: smith form properties on random input") {
    Rng rng(204);
    for (int t = 0; t < 20; ++t) {
        const int n = 1 + static_cast<int>(rng.below(6));
        const IntMat a = testing::random_nonsingular(n, -60, 60, rng);
        check_smith_triple(a, smith_classical(a));
    }
}

TEST_CASE("kernel: smith form is invariant under unimodular multiplication") {
    Rng rng(205);
    for (int t = 0; t < 8; ++t) {
        const int n = 2 + static_cast<int>(rng.below(4));
        const IntMat a = testing::random_nonsingular(n, -40, 40, rng);
        const IntMat u = testing::random_unimodular(n, 10, rng);
        REQUIRE(abs(det_exact(u)) == 1);
        CHECK(smith_classical(matmul(u, a)).S == smith_classical(a).S);
        CHECK(smith_classical(matmul(a, u)).S == smith_classical(a).S);
    }
}

TEST_CASE("kernel: smith form error paths") {
    CHECK_THROWS_AS(smith_classical(IntMat::from_rows({{1, 2}, {2, 4}})), singular_error);
    CHECK_THROWS_AS(smith_classical(IntMat::zero(3, 2)), dimension_error);
}
