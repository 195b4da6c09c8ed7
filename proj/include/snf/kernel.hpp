#pragma once

#include "snf/intmat.hpp"

namespace snf {

// Fraction-free (Bareiss) determinant.  Exact for any square matrix; returns
// 0 for singular input.
Int det_exact(const IntMat& a);

// Lower triangular row Hermite form of a nonsingular matrix: H = T A with
// |det T| = 1, positive diagonal, and every below-diagonal entry reduced into
// [0, H[j][j]) by the diagonal of its column.  Throws singular_error when the
// input is singular.
IntMat hermite_lower(const IntMat& a);

// Classical Smith form with multipliers: U0 * A * V0 = diag(S) with U0, V0
// unimodular.  V0inv is accumulated alongside V0 (inverse elementary column
// operations applied as row operations), so callers get V0^{-1} without a
// matrix inversion.  Gcd elimination; intended for moderate sizes and as the
// deterministic backbone of the massager construction.
struct SmithTriple {
    SmithForm S;
    IntMat U0;
    IntMat V0;
    IntMat V0inv;
};

SmithTriple smith_classical(const IntMat& a);

} // namespace snf
