#include <doctest.h>

#include "rational_oracle.hpp"
#include "snf/adjoint.hpp"
#include "snf/fixtures.hpp"
#include "snf/kernel.hpp"
#include "test_helpers.hpp"

using namespace snf;

// A deterministic multiplier triple for the 4x4 fixture.
static SmithMultipliers a4_triple() {
    Rng rng(701);
    return smith_form_multipliers(fixtures::a4(), rng);
}

TEST_CASE("adjoint: representation reproduces the scaled inverse") {
    const OuterProductAdjoint opa = outer_product_adjoint(fixtures::a4(), a4_triple());
    CHECK(opa.n() == 4);
    CHECK(opa.s() == 29088);
    CHECK(frac_inverse(opa) == mat_mod(fixtures::a4_scaled_inverse(), Int(29088)));
    // stored data is reduced
    CHECK(opa.Vbar == colmod(opa.Vbar, opa.S));
    CHECK(rowmod(opa.Ubar, opa.S) == opa.Ubar);
}

TEST_CASE("adjoint: the published compact pair is itself valid") {
    // the reduced massager M and the frozen Ubar satisfy the same identity
    OuterProductAdjoint opa;
    opa.S = fixtures::a4_smith();
    opa.Vbar = fixtures::a4_massager_m();
    opa.Ubar = fixtures::a4_opa_ubar();
    CHECK(frac_inverse(opa) == mat_mod(fixtures::a4_scaled_inverse(), Int(29088)));
}

TEST_CASE("adjoint: fraction-free solving") {
    const OuterProductAdjoint opa = outer_product_adjoint(fixtures::a4(), a4_triple());
    const IntVec b = {Int(25), Int(94), Int(12), Int(-2)};
    const IntVec expect = {Int(11011), Int(20716), Int(8682), Int(17424)};
    CHECK(frac_solve(opa, b) == expect);
    // columns of A solve to s * e_j mod s = 0
    for (int j = 0; j < 4; ++j)
        CHECK(frac_solve(opa, fixtures::a4().col(j)) == IntVec(4, Int(0)));
}

TEST_CASE("adjoint: matches the rational oracle on random systems") {
    Rng rng(702);
    for (int t = 0; t < 12; ++t) {
        const int n = 1 + static_cast<int>(rng.below(6));
        const IntMat a = testing::random_nonsingular(n, -60, 60, rng);
        Rng run(rng.next_u64());
        const SmithMultipliers triple = smith_form_multipliers(a, run);
        const OuterProductAdjoint opa = outer_product_adjoint(a, triple);
        const Int s = triple.S.diag.back();

        const auto ainv = oracle::inverse(a);
        REQUIRE(ainv.has_value());
        const auto scaled = oracle::scale(*ainv, oracle::Rat(s));
        REQUIRE(oracle::is_integral(scaled)); // s A^{-1} is integral by design
        CHECK(frac_inverse(opa) == mat_mod(oracle::to_integer(scaled), s));

        const IntVec b = testing::random_vector(n, -99, 99, rng);
        const IntVec got = frac_solve(opa, b);
        const IntVec want = matvec(mat_mod(oracle::to_integer(scaled), s), b);
        REQUIRE(got.size() == want.size());
        for (int i = 0; i < n; ++i) CHECK(got[i] == rem(want[i], s));
    }
}

TEST_CASE("adjoint: rejects triples that do not satisfy A V = U S") {
    SmithMultipliers t = a4_triple();
    MatBuf vb = t.V.thaw();
    vb.at(1, 1) += 1;
    t.V = vb.freeze();
    CHECK_THROWS_AS(outer_product_adjoint(fixtures::a4(), t), precondition_error);
}

TEST_CASE("adjoint: rejects non-unimodular multipliers") {
    // A V = U S holds, but S is not the Smith form, so U cannot be unimodular
    SmithMultipliers t;
    t.S = SmithForm({Int(1), Int(2)});
    t.V = IntMat::identity(2);
    t.U = IntMat::diagonal({Int(2), Int(1)});
    const IntMat a = IntMat::diagonal({Int(2), Int(2)});
    REQUIRE(matmul(a, t.V) == matmul(t.U, IntMat::diagonal(t.S.diag)));
    CHECK_THROWS_AS(outer_product_adjoint(a, t), precondition_error);
}

TEST_CASE("adjoint: json round trip") {
    const OuterProductAdjoint opa = outer_product_adjoint(fixtures::a4(), a4_triple());
    const std::string text = opa_to_json(opa);
    const OuterProductAdjoint back = opa_from_json(text);
    CHECK(back.S == opa.S);
    CHECK(back.Vbar == opa.Vbar);
    CHECK(back.Ubar == opa.Ubar);
    CHECK(frac_inverse(back) == frac_inverse(opa));
    // serialization is deterministic
    CHECK(opa_to_json(back) == text);
}

TEST_CASE("adjoint: json parser rejects malformed documents") {
    CHECK_THROWS_AS(opa_from_json("not json at all"), parse_error);
    CHECK_THROWS_AS(opa_from_json("{}"), parse_error);
    CHECK_THROWS_AS(opa_from_json("{\"n\": 2}"), parse_error);
    // diag that is not a divisibility chain
    CHECK_THROWS_AS(opa_from_json(R"({"n":2,"s":"3","diag":["2","3"],"vbar":[],"ubar":[]})"),
                    parse_error);
    // s disagrees with the last invariant factor
    CHECK_THROWS_AS(opa_from_json(R"({"n":2,"s":"7","diag":["1","6"],"vbar":[],"ubar":[]})"),
                    parse_error);
    // missing contribution for a nontrivial invariant factor
    CHECK_THROWS_AS(opa_from_json(R"({"n":2,"s":"6","diag":["1","6"],"vbar":[],"ubar":[]})"),
                    parse_error);
    // out-of-range column index
    CHECK_THROWS_AS(opa_from_json(
                        R"({"n":2,"s":"6","diag":["1","6"],
                            "vbar":[{"j":3,"col":["1","2"]}],
                            "ubar":[{"i":2,"row":["1","2"]}]})"),
                    parse_error);
    // entry outside [0, s_j)
    CHECK_THROWS_AS(opa_from_json(
                        R"({"n":2,"s":"6","diag":["1","6"],
                            "vbar":[{"j":2,"col":["1","7"]}],
                            "ubar":[{"i":2,"row":["1","2"]}]})"),
                    parse_error);
    // a well-formed minimal document parses
    const OuterProductAdjoint mini = opa_from_json(
        R"({"n":2,"s":"6","diag":["1","6"],
            "vbar":[{"j":2,"col":["1","5"]}],
            "ubar":[{"i":2,"row":["0","3"]}]})");
    CHECK(mini.n() == 2);
    CHECK(mini.s() == 6);
    CHECK(mini.Vbar.at(1, 1) == 5);
    CHECK(mini.Ubar.at(1, 0) == 0);
}
