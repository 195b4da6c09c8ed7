#pragma once

#include <string>

#include "snf/intmat.hpp"
#include "snf/multipliers.hpp"

namespace snf {

// Compact representation of s A^{-1} mod s built from a Smith multiplier
// triple: with Vbar = colmod(V, S) and Ubar = rowmod(U^{-1}, S),
//   s A^{-1}  ==  sum_j Vbar[:,j] (s / s_j) Ubar[j,:]   (mod s),
// and only columns/rows with s_j > 1 contribute.
struct OuterProductAdjoint {
    SmithForm S;
    IntMat Vbar;
    IntMat Ubar;

    int n() const { return S.n(); }
    const Int& s() const { return S.diag.back(); }
};

// Builds the representation, verifying A V = U S and inverting U (with a
// certified unimodularity check) along the way.
OuterProductAdjoint outer_product_adjoint(const IntMat& a, const SmithMultipliers& t);

// Rem(s A^{-1} b, s) for an integer vector b.
IntVec frac_solve(const OuterProductAdjoint& opa, const IntVec& b);

// Rem(s A^{-1}, s) as a dense matrix.
IntMat frac_inverse(const OuterProductAdjoint& opa);

// JSON round trip.  Schema: {"n": int, "s": dec-string, "diag": [dec-string],
// "vbar": [{"j": 1-based col, "col": [dec-string]}], "ubar": [{"i": 1-based
// row, "row": [dec-string]}]} with only the s_j > 1 columns/rows stored.
std::string opa_to_json(const OuterProductAdjoint& opa);
OuterProductAdjoint opa_from_json(const std::string& text);

} // namespace snf
