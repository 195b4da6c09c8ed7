#include <doctest.h>

#include "rational_oracle.hpp"
#include "snf/fixtures.hpp"
#include "snf/kernel.hpp"
#include "snf/lifting.hpp"
#include "test_helpers.hpp"

using namespace snf;

static Int pow_int_t(const Int& x, int e) {
    Int r = 1;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

TEST_CASE("lifting: modulus exponent for a pinned prime") {
    // target is max(10000, ceil(3.61 n^2 ||A||)); for the 4x4 fixture with
    // p = 5 that forces 5^6 = 15625
    CHECK(lifting_exponent_for(fixtures::a4(), 5) == 6);
    const LiftingContext ctx = make_lifting_context(fixtures::a4(), 5);
    CHECK(ctx.p == 5);
    CHECK(ctx.e == 6);
    CHECK(ctx.X == 15625);
    CHECK(ctx.normA == max_norm(fixtures::a4()));
    CHECK(mat_mod(matmul(fixtures::a4(), ctx.invA_modX), ctx.X) == IntMat::identity(4));
}

TEST_CASE("lifting: newton inverse mod a prime power") {
    const IntMat a = IntMat::from_rows({{2, 1}, {1, 1}});
    CHECK(inverse_mod_X(a, 5, 2) == IntMat::from_rows({{1, 24}, {24, 2}}));
    CHECK(inverse_mod_X(IntMat::identity(3), 7, 4) == IntMat::identity(3));

    Rng rng(301);
    for (int t = 0; t < 10; ++t) {
        const int n = 1 + static_cast<int>(rng.below(5));
        const std::uint64_t p = (t % 2) ? 10007 : 13;
        IntMat m;
        for (;;) {
            m = testing::random_matrix(n, n, -80, 80, rng);
            if (det_exact(m) % Int(static_cast<unsigned long>(p)) != 0) break;
        }
        const int e = 1 + (t % 3);
        const Int xe = pow_int_t(Int(static_cast<unsigned long>(p)), e);
        const IntMat inv = inverse_mod_X(m, p, e);
        CHECK(mat_mod(matmul(m, inv), xe) == IntMat::identity(n));
        CHECK(mat_mod(inv, xe) == inv); // already reduced
    }
}

TEST_CASE("lifting: newton inverse error paths") {
    CHECK_THROWS_AS(inverse_mod_X(IntMat::from_rows({{5, 0}, {0, 1}}), 5, 2), precondition_error);
    CHECK_THROWS_AS(inverse_mod_X(IntMat::zero(2, 3), 5, 2), dimension_error);
    CHECK_THROWS_AS(inverse_mod_X(IntMat::identity(2), 5, 0), precondition_error);
    CHECK_THROWS_AS(make_lifting_context(IntMat::identity(2), 4), precondition_error);
}

TEST_CASE("lifting: sampled modulus meets every constraint") {
    Rng rng(302);
    const IntMat a = fixtures::a4();
    const Int d = det_exact(a);
    for (int t = 0; t < 3; ++t) {
        const LiftingContext ctx = choose_lifting_modulus(a, rng);
        CHECK(is_prime_u64(ctx.p));
        CHECK(ctx.p % 2 == 1);
        CHECK(ctx.X == pow_int_t(Int(static_cast<unsigned long>(ctx.p)), ctx.e));
        CHECK(ctx.X >= 10000);
        Int g;
        mpz_gcd(g.get_mpz_t(), ctx.X.get_mpz_t(), d.get_mpz_t());
        CHECK(g == 1);
        CHECK(mat_mod(matmul(a, ctx.invA_modX), ctx.X) == IntMat::identity(4));
    }
}

TEST_CASE("lifting: sampled modulus rejects singular input") {
    Rng rng(303);
    const IntMat s = IntMat::from_rows({{1, 2}, {2, 4}});
    CHECK_THROWS_AS(choose_lifting_modulus(s, rng), singular_error);
}

TEST_CASE("lifting: high-order residue fixture") {
    const LiftingContext ctx = make_lifting_context(IntMat::from_rows({{3}}), 10007);
    REQUIRE(ctx.X == 10007);
    const HighOrderResidue hor = high_order_residue(ctx, 1);
    CHECK(hor.D == IntMat::from_rows({{3336}}));
    CHECK(hor.R == IntMat::from_rows({{-1}}));
}

TEST_CASE("lifting: high-order residue identity and bounds") {
    Rng rng(304);
    for (int t = 0; t < 12; ++t) {
        const int n = 1 + static_cast<int>(rng.below(5));
        const IntMat a = testing::random_nonsingular(n, -90, 90, rng);
        const LiftingContext ctx = choose_lifting_modulus(a, rng);
        const int k = 1 + (t % 3);
        const Int xk = pow_int_t(ctx.X, k);
        const HighOrderResidue hor = high_order_residue(ctx, k);
        REQUIRE(hor.k == k);
        // I - A D = R X^k, exactly
        CHECK(sub(IntMat::identity(n), matmul(a, hor.D)) == scale(hor.R, xk));
        // D is the symmetric residue: ||D|| <= 0.6 X^k
        CHECK(5 * max_norm(hor.D) <= 3 * xk);
        // ||R|| <= 0.6 n ||A||
        CHECK(5 * max_norm(hor.R) <= 3 * n * ctx.normA);
    }
    const LiftingContext ctx = make_lifting_context(fixtures::a4(), 5);
    CHECK_THROWS_AS(high_order_residue(ctx, 0), precondition_error);
}

TEST_CASE("lifting: x-adic digits") {
    // 7 * 123 = 861 -> digits 1, 6, 8 base 10
    const XadicSeries prod =
        xadic_mul(IntMat::from_rows({{7}}), to_xadic(IntMat::from_rows({{123}}), Int(10), 3), Int(10), 3);
    REQUIRE(prod.size() == 3);
    CHECK(prod[0] == IntMat::from_rows({{1}}));
    CHECK(prod[1] == IntMat::from_rows({{6}}));
    CHECK(prod[2] == IntMat::from_rows({{8}}));

    Rng rng(305);
    for (int t = 0; t < 10; ++t) {
        const Int x(2 + static_cast<long>(rng.below(1000)));
        const int d = 1 + static_cast<int>(rng.below(4));
        const Int xd = pow_int_t(x, d);
        const IntMat b = testing::skewed_matrix(3, 2, 40, rng);
        const XadicSeries series = to_xadic(b, x, d);
        REQUIRE(series.size() == static_cast<size_t>(d));
        for (const IntMat& digit : series) {
            CHECK(max_norm(digit) < x);
            for (int i = 0; i < digit.rows(); ++i)
                for (int j = 0; j < digit.cols(); ++j) CHECK(digit.at(i, j) >= 0);
        }
        CHECK(from_xadic(series, x) == mat_mod(b, xd));

        const IntMat c = mat_mod(testing::random_matrix(3, 3, -999, 999, rng), x);
        CHECK(from_xadic(xadic_mul(c, series, x, d), x) == mat_mod(matmul(c, b), xd));
    }
    CHECK_THROWS_AS(to_xadic(IntMat::identity(2), Int(1), 2), precondition_error);
    CHECK_THROWS_AS(xadic_mul(IntMat::from_rows({{10}}), to_xadic(IntMat::identity(1), Int(10), 1), Int(10), 1),
                    precondition_error);
}

TEST_CASE("lifting: solve_mod on the system A X = A") {
    const LiftingContext ctx = make_lifting_context(fixtures::a4(), 5);
    CHECK(solve_mod(ctx, fixtures::a4(), 2) == IntMat::identity(4));
}

TEST_CASE("lifting: solve_mod matches the rational oracle") {
    Rng rng(306);
    for (int t = 0; t < 20; ++t) {
        const int n = 1 + static_cast<int>(rng.below(8));
        const int m = 1 + static_cast<int>(rng.below(3));
        const IntMat a = testing::random_nonsingular(n, -99, 99, rng);
        const IntMat b = testing::random_matrix(n, m, -99, 99, rng);
        const LiftingContext ctx = choose_lifting_modulus(a, rng);
        const int d = 1 + (t % 3);
        const Int xd = pow_int_t(ctx.X, d);
        const IntMat got = solve_mod(ctx, b, d);
        const auto sol = oracle::solve(a, b);
        REQUIRE(sol.has_value());
        CHECK(got == oracle::rat_mod_mat(*sol, xd));
    }
}

TEST_CASE("lifting: integrality certification on the 4x4 fixture") {
    const LiftingContext ctx = make_lifting_context(fixtures::a4(), 5);
    const Int s4 = fixtures::a4_smith().s(3);
    REQUIRE(s4 == 29088);

    const CertifyResult yes = integrality_certify(ctx, s4, IntMat::identity(4));
    REQUIRE(yes.integral);
    CHECK(yes.value == mat_mod(fixtures::a4_scaled_inverse(), s4));

    const CertifyResult no = integrality_certify(ctx, Int(9), IntMat::identity(4));
    CHECK_FALSE(no.integral);
}

TEST_CASE("lifting: integrality certification matches the rational oracle") {
    Rng rng(307);
    int integral_seen = 0, fractional_seen = 0;
    for (int t = 0; t < 40; ++t) {
        const int n = 1 + static_cast<int>(rng.below(6));
        const int m = 1 + static_cast<int>(rng.below(3));
        const IntMat a = testing::random_nonsingular(n, -60, 60, rng);
        const IntMat b = testing::random_matrix(n, m, -60, 60, rng);
        const LiftingContext ctx = choose_lifting_modulus(a, rng);
        const auto sol = oracle::solve(a, b);
        REQUIRE(sol.has_value());

        Int s;
        if (t % 2 == 0) {
            // a multiple of the true denominator: certification must accept
            s = oracle::denominator_lcm(*sol) * Int(1 + static_cast<long>(rng.below(4)));
        } else {
            s = Int(1 + static_cast<long>(rng.below(50)));
        }
        const CertifyResult got = integrality_certify(ctx, s, b);
        const auto scaled = oracle::scale(*sol, oracle::Rat(s));
        const bool expect = oracle::is_integral(scaled);
        CHECK(got.integral == expect);
        if (expect) {
            ++integral_seen;
            CHECK(got.value == mat_mod(oracle::to_integer(scaled), s));
        } else {
            ++fractional_seen;
        }
    }
    // the mix really exercised both verdicts
    CHECK(integral_seen >= 10);
    CHECK(fractional_seen >= 5);
}

TEST_CASE("lifting: integrality certification trivial cases") {
    const LiftingContext ctx = make_lifting_context(fixtures::a4(), 5);
    const CertifyResult zero = integrality_certify(ctx, Int(7), IntMat::zero(4, 2));
    REQUIRE(zero.integral);
    CHECK(zero.value == IntMat::zero(4, 2));
    // s = 1 asks whether A^{-1} B itself is integral: no for B = I (A is not
    // unimodular), yes for B = A, where the residue reduces to 0 mod 1.
    const CertifyResult one = integrality_certify(ctx, Int(1), IntMat::identity(4));
    CHECK_FALSE(one.integral);
    const CertifyResult self = integrality_certify(ctx, Int(1), fixtures::a4());
    REQUIRE(self.integral);
    CHECK(self.value == IntMat::zero(4, 4));
    CHECK_THROWS_AS(integrality_certify(ctx, Int(0), IntMat::identity(4)), precondition_error);
    CHECK_THROWS_AS(integrality_certify(ctx, Int(5), IntMat::identity(3)), dimension_error);
}

TEST_CASE("lifting: exact inverse of a unimodular matrix") {
    CHECK(inverse_unimodular(IntMat::identity(3)) == IntMat::identity(3));
    Rng rng(308);
    for (int t = 0; t < 8; ++t) {
        const int n = 1 + static_cast<int>(rng.below(6));
        const IntMat u = testing::random_unimodular(n, 14, rng);
        REQUIRE(abs(det_exact(u)) == 1);
        const IntMat uinv = inverse_unimodular(u);
        CHECK(matmul(u, uinv) == IntMat::identity(n));
        CHECK(matmul(uinv, u) == IntMat::identity(n));
    }
    CHECK_THROWS_AS(inverse_unimodular(IntMat::diagonal({Int(2), Int(1)})), precondition_error);
    CHECK_THROWS_AS(inverse_unimodular(IntMat::zero(2, 3)), dimension_error);
}
