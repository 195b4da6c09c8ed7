#pragma once

#include <cstdint>
#include <vector>

#include "snf/intmat.hpp"
#include "snf/rng.hpp"

namespace snf {

// State shared by the lifting routines: an odd prime power X = p^e coprime to
// det A with X >= max(10000, ceil(3.61 n^2 ||A||)), plus Rem(A^{-1}, X).
struct LiftingContext {
    IntMat A;
    std::uint64_t p = 0;
    int e = 0;
    Int X;
    IntMat invA_modX;
    Int normA;
};

// Smallest exponent/modulus for a given prime meeting the size constraints.
// Exposed for tests that pin the prime.
int lifting_exponent_for(const IntMat& a, std::uint64_t p);

// Builds the context.  p is sampled from a (6 ln C, 12 ln C) window around
// the Hadamard bound C, proven prime, and rejected when det A vanishes mod p.
// After `max_retries` dead attempts: singular_error when det_exact(A) = 0,
// retries_exhausted otherwise.
LiftingContext choose_lifting_modulus(const IntMat& a, Rng& rng, int max_retries = 20);

// Context for a known-good prime (test hook; same checks, no sampling).
LiftingContext make_lifting_context(const IntMat& a, std::uint64_t p);

// Rem(A^{-1}, p^e) by Newton doubling from the mod-p inverse.
IntMat inverse_mod_X(const IntMat& a, std::uint64_t p, int e);

// High-order residue: I - A D = R X^k exactly, D in the symmetric range
// mod X^k (so ||D|| <= 0.6 X^k) and ||R|| <= 0.6 n ||A||.
struct HighOrderResidue {
    int k = 0;
    IntMat D;
    IntMat R;
};

HighOrderResidue high_order_residue(const LiftingContext& ctx, int k);

// X-adic coefficient form: little-endian digit matrices with entries in [0, X).
using XadicSeries = std::vector<IntMat>;

XadicSeries to_xadic(const IntMat& b, const Int& x, int d);
IntMat from_xadic(const XadicSeries& series, const Int& x);

// Rem(C * B, X^d) in X-adic form; requires ||C|| < X.
XadicSeries xadic_mul(const IntMat& c, const XadicSeries& b, const Int& x, int d);

// Rem(A^{-1} B, X^d), entries in [0, X^d).  B is converted to X-adic form
// once, the inverse is applied coefficient-wise with carry propagation, and
// the result is recombined once.
IntMat solve_mod(const LiftingContext& ctx, const IntMat& b, int d);

// Integrality certification: decides whether s A^{-1} B is integral and, if
// so, returns Rem(s A^{-1} B, s).  Every accept/reject comparison is exact
// integer arithmetic.
struct CertifyResult {
    bool integral = false;
    IntMat value; // only meaningful when integral
};

CertifyResult integrality_certify(const LiftingContext& ctx, const Int& s, const IntMat& b);

// Exact inverse of a unimodular matrix via high-order lifting: lift past the
// adjugate's Hadamard bound, read the symmetric residue, certify U Uinv = I.
IntMat inverse_unimodular(const IntMat& u);

} // namespace snf
