#pragma once

#include <vector>

#include "snf/intmat.hpp"

namespace snf {

enum class LinMode { columns, rows, permutation };

// A partially linearized matrix D together with the bookkeeping needed to
// map results on D back to the original matrix.
struct Linearization {
    LinMode mode = LinMode::columns;
    int n = 0, m = 0; // original shape
    int d = 0;        // chunk width (bits)
    // Per-column e (columns mode), per-row e (rows mode).  In permutation
    // mode this is the column-pass vector for the permuted matrix; the row
    // pass reuses it padded with zeros.
    std::vector<int> ebar;
    // Permutation mode only: Aperm[i][j] = A[row_perm[i]][col_perm[j]], with
    // the last row negated when the permutation pair is odd so that the
    // determinant is preserved exactly.
    std::vector<int> row_perm, col_perm;
    IntMat D;

    int nbar() const { return D.rows(); }
    int mbar() const { return D.cols(); }
};

// C*_{e,d}(v): the e sign-split high-order digit columns of v, i.e. the
// base-2^d digits of Quo*(v, 2^d) with the last column absorbing the rest.
// v is a column (k x 1); result is k x e.
IntMat column_expansion(const IntMat& v, int e, int d);

// Column / row / permutation linearizations.  All preserve the determinant
// (when square), keep ||D|| <= 2^d, and respect the dimension bounds
// nbar < n + m, mbar < 2m (permutation mode: nbar < 3n).
Linearization linearize_columns(const IntMat& a);
Linearization linearize_rows(const IntMat& a);
Linearization linearize_permutation(const IntMat& a);

// Leading n x n block of B (an nbar x nbar Hermite form, adjugate or inverse
// numerator of lin.D).  In permutation mode the stored permutations are
// undone in the adjugate orientation: result[col_perm[l]][row_perm[k]] =
// P[l][k], negating the column that maps back through the sign-compensated
// last row when the permutation pair is odd.
IntMat principal_submatrix(const Linearization& lin, const IntMat& b);

// Given a reduced Smith massager (S_D, M_D) for lin.D in the block-trivial
// shape diag(I, S), extracts the massager (S, M) of the original matrix.
struct RecoveredMassager {
    SmithForm S;
    IntMat M;
};

RecoveredMassager recover_massager(const Linearization& lin, const SmithForm& sd, const IntMat& md);

// -F^{-1}E for a columns-mode linearization: the (nbar-n) x n block mapping
// M1 to -M2 in the massager recovery proof.  Column i carries
// (2^d, 2^{2d}, ..., 2^{e_i d})^T at its gadget rows.  Used to recover the
// certificate W alongside (S, M).
IntMat colmode_gadget_map(const Linearization& lin);

} // namespace snf
