#pragma once

#include <optional>
#include <vector>

#include "snf/intmat.hpp"
#include "snf/linearize.hpp"

namespace snf {

// A reduced Smith massager for a nonsingular n x n matrix A:
//   S  the Smith form of A,
//   M  with A M == 0 (colmod S) and 0 <= M[i][j] < s_j,
//   W  a certificate with W M == I (colmod S).
struct SmithMassager {
    SmithForm S;
    IntMat M;
    IntMat W;
};

enum class MassagerPath { auto_select, direct, linearized };

// Computes a reduced Smith massager of A.  auto_select linearizes the
// columns first when their lengths are noticeably skewed; direct runs
// elimination on A itself.  Throws singular_error for singular input and
// integrity_error if the internal certificate check fails.
SmithMassager smith_massager(const IntMat& a, MassagerPath path = MassagerPath::auto_select);

enum class MassagerVerdict { accepted, accepted_partial, rejected };

// Checks a claimed massager.  With a certificate W the check is complete.
// Without one, the invariant structure is probed at every prime found by
// trial division (plus a primality test on the residual); primes hidden in
// a composite residual are skipped, giving accepted_partial at best.
MassagerVerdict verify_massager(const IntMat& a, const SmithForm& s, const IntMat& m,
                                const IntMat* w = nullptr);

// Sanctioned column operations preserving the massager property.
struct MassagerColOp {
    enum class Kind {
        add_si_multiple,  // col i += s_i * u          (u any integer vector)
        add_col_multiple, // col i += c * col j        (requires i < j)
        scale_unit        // col i *= c                (requires gcd(c, s_i) = 1)
    } kind;
    int i = 0;
    int j = 0;
    Int c;
    IntVec u;
};

// Applies the operation to (M, W), returning the updated pair with column i
// re-reduced mod s_i.  The massager property is preserved by construction.
std::pair<IntMat, IntMat> massager_col_op(const SmithForm& s, const IntMat& m, const IntMat& w,
                                          const MassagerColOp& op);

// Membership of the row vector v in the row lattice generated by
// { rows of A } over Z, decided through the massager: v is in the lattice
// iff v M == 0 (colmod S).
bool in_row_lattice(const SmithForm& s, const IntMat& m, const IntVec& v);

// Smallest positive integer t such that t * v lies in the row lattice.
Int denominator_of(const SmithForm& s, const IntMat& m, const IntVec& v);

// Left equivalence test: H (a nonsingular integer matrix, typically a
// Hermite form candidate) is left equivalent to A iff |det H| = det S and
// H M == 0 (colmod S).
bool is_left_equivalent(const IntMat& h, const SmithForm& s, const IntMat& m);

} // namespace snf
