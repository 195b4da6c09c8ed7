#include "snf/kernel.hpp"

namespace snf {

// ---------------------------------------------------------------------------
// Determinant (Bareiss)
// ---------------------------------------------------------------------------

Int det_exact(const IntMat& a) {
    if (a.rows() != a.cols())
        throw dimension_error("det_exact: matrix must be square");
    const int n = a.rows();
    if (n == 0)
        return 1;
    MatBuf w = a.thaw();
    int sign = 1;
    Int prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (w.at(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (w.at(i, k) != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0)
                return 0;
            for (int j = k; j < n; ++j)
                swap(w.at(k, j), w.at(piv, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                Int t = w.at(i, j) * w.at(k, k) - w.at(i, k) * w.at(k, j);
                mpz_divexact(w.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            w.at(i, k) = 0;
        }
        prev = w.at(k, k);
    }
    return sign > 0 ? w.at(n - 1, n - 1) : Int(-w.at(n - 1, n - 1));
}

// ---------------------------------------------------------------------------
// Elementary operation helpers on a MatBuf
// ---------------------------------------------------------------------------

namespace {

void row_addmul(MatBuf& m, int dst, int src, const Int& c) {
    for (int j = 0; j < m.cols(); ++j)
        m.at(dst, j) += c * m.at(src, j);
}

void row_swap(MatBuf& m, int r1, int r2) {
    for (int j = 0; j < m.cols(); ++j)
        swap(m.at(r1, j), m.at(r2, j));
}

void row_negate(MatBuf& m, int r) {
    for (int j = 0; j < m.cols(); ++j)
        m.at(r, j) = -m.at(r, j);
}

void col_swap(MatBuf& m, int c1, int c2) {
    for (int i = 0; i < m.rows(); ++i)
        swap(m.at(i, c1), m.at(i, c2));
}

void col_addmul(MatBuf& m, int dst, int src, const Int& c) {
    for (int i = 0; i < m.rows(); ++i)
        m.at(i, dst) += c * m.at(i, src);
}

void col_negate(MatBuf& m, int c) {
    for (int i = 0; i < m.rows(); ++i)
        m.at(i, c) = -m.at(i, c);
}

// Two-row unimodular transform putting gcd(w[r1][col], w[r2][col]) at
// (r1, col) and 0 at (r2, col).  The same transform is applied to `track`.
void rows_gcd_step(MatBuf& w, MatBuf* track, int r1, int r2, int col) {
    const Int a = w.at(r1, col), b = w.at(r2, col);
    if (b == 0)
        return;
    if (a != 0 && mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) {
        Int q = -b / a;
        row_addmul(w, r2, r1, q);
        if (track)
            row_addmul(*track, r2, r1, q);
        return;
    }
    Int g, p, q;
    mpz_gcdext(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    Int ag = a / g, bg = b / g;
    // [r1'] = [ p    q ] [r1]      det = p*(a/g) + q*(b/g) = 1
    // [r2'] = [-b/g a/g] [r2]
    auto apply = [&](MatBuf& m) {
        for (int j = 0; j < m.cols(); ++j) {
            Int x = m.at(r1, j), y = m.at(r2, j);
            m.at(r1, j) = p * x + q * y;
            m.at(r2, j) = ag * y - bg * x;
        }
    };
    apply(w);
    if (track)
        apply(*track);
}

// Column analogue: gcd lands at (row, c1), zero at (row, c2).  V gets the
// same column transform; Vinv gets the inverse transform as row operations.
void cols_gcd_step(MatBuf& w, MatBuf* v, MatBuf* vinv, int c1, int c2, int row) {
    const Int a = w.at(row, c1), b = w.at(row, c2);
    if (b == 0)
        return;
    if (a != 0 && mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) {
        Int q = -b / a;
        col_addmul(w, c2, c1, q);
        if (v)
            col_addmul(*v, c2, c1, q);
        if (vinv)
            row_addmul(*vinv, c1, c2, -q); // inverse of "col c2 += q col c1"
        return;
    }
    Int g, p, q;
    mpz_gcdext(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    Int ag = a / g, bg = b / g;
    // Columns are combined by E = [[p, -b/g], [q, a/g]] (acting on (c1, c2)),
    // so E^{-1} = [[a/g, b/g], [-q, p]] acts on the rows (c1, c2) of Vinv.
    auto apply_cols = [&](MatBuf& m) {
        for (int i = 0; i < m.rows(); ++i) {
            Int x = m.at(i, c1), y = m.at(i, c2);
            m.at(i, c1) = p * x + q * y;
            m.at(i, c2) = ag * y - bg * x;
        }
    };
    apply_cols(w);
    if (v)
        apply_cols(*v);
    if (vinv) {
        for (int j = 0; j < vinv->cols(); ++j) {
            Int x = vinv->at(c1, j), y = vinv->at(c2, j);
            vinv->at(c1, j) = ag * x + bg * y;
            vinv->at(c2, j) = p * y - q * x;
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Lower triangular row Hermite form
// ---------------------------------------------------------------------------

IntMat hermite_lower(const IntMat& a) {
    if (a.rows() != a.cols())
        throw dimension_error("hermite_lower: matrix must be square");
    const int n = a.rows();
    MatBuf w = a.thaw();

    // Clear each column above its diagonal, rightmost column first; only rows
    // 0..j take part, so previously cleared columns stay clear.
    for (int j = n - 1; j >= 0; --j) {
        for (int i = 0; i < j; ++i)
            rows_gcd_step(w, nullptr, j, i, j);
        if (w.at(j, j) == 0)
            throw singular_error("hermite_lower: input is singular");
        if (w.at(j, j) < 0)
            row_negate(w, j);
    }
    // Canonical reduction below the diagonal.  Working right-to-left inside a
    // row keeps already reduced entries reduced.
    for (int i = 1; i < n; ++i)
        for (int j = i - 1; j >= 0; --j) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), w.at(i, j).get_mpz_t(), w.at(j, j).get_mpz_t());
            if (q != 0)
                row_addmul(w, i, j, -q);
        }
    return w.freeze();
}

// ---------------------------------------------------------------------------
// Classical Smith form with multipliers
// ---------------------------------------------------------------------------

SmithTriple smith_classical(const IntMat& a) {
    if (a.rows() != a.cols())
        throw dimension_error("smith_classical: matrix must be square");
    const int n = a.rows();
    MatBuf w = a.thaw();
    MatBuf u = IntMat::identity(n).thaw();
    MatBuf v = IntMat::identity(n).thaw();
    MatBuf vinv = IntMat::identity(n).thaw();

    for (int k = 0; k < n; ++k) {
        // Move a smallest magnitude nonzero of the trailing block to (k, k);
        // small pivots keep the gcd elimination tame.
        int pi = -1, pj = -1;
        Int best;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j) {
                if (w.at(i, j) == 0)
                    continue;
                Int m = abs(w.at(i, j));
                if (pi < 0 || m < best) {
                    best = m;
                    pi = i;
                    pj = j;
                }
            }
        if (pi < 0)
            throw singular_error("smith_classical: input is singular");
        if (pi != k) {
            row_swap(w, k, pi);
            row_swap(u, k, pi);
        }
        if (pj != k) {
            col_swap(w, k, pj);
            col_swap(v, k, pj);
            row_swap(vinv, k, pj);
        }
        // Alternate clearing column k and row k until both stay clear.
        for (;;) {
            for (int i = k + 1; i < n; ++i)
                rows_gcd_step(w, &u, k, i, k);
            bool row_dirty = false;
            for (int j = k + 1; j < n; ++j)
                if (w.at(k, j) != 0) {
                    row_dirty = true;
                    break;
                }
            if (!row_dirty)
                break;
            for (int j = k + 1; j < n; ++j)
                cols_gcd_step(w, &v, &vinv, k, j, k);
            bool col_dirty = false;
            for (int i = k + 1; i < n; ++i)
                if (w.at(i, k) != 0) {
                    col_dirty = true;
                    break;
                }
            if (!col_dirty)
                break;
        }
    }

    // Make the diagonal positive (column sign flips keep U untouched).
    for (int k = 0; k < n; ++k)
        if (w.at(k, k) < 0) {
            col_negate(w, k);
            col_negate(v, k);
            row_negate(vinv, k);
        }

    // Repair the divisibility chain with gcd/lcm passes on adjacent pairs.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i + 1 < n; ++i) {
            if (mpz_divisible_p(w.at(i + 1, i + 1).get_mpz_t(), w.at(i, i).get_mpz_t()))
                continue;
            changed = true;
            // diag(a, b) -> diag(gcd, lcm), all multipliers tracked.
            col_addmul(w, i, i + 1, 1);
            col_addmul(v, i, i + 1, 1);
            row_addmul(vinv, i + 1, i, -1);
            rows_gcd_step(w, &u, i, i + 1, i);
            Int c = w.at(i, i + 1) / w.at(i, i); // exact: q * (b/g)
            if (c != 0) {
                col_addmul(w, i + 1, i, -c);
                col_addmul(v, i + 1, i, -c);
                row_addmul(vinv, i, i + 1, c);
            }
            if (w.at(i, i) < 0) {
                col_negate(w, i);
                col_negate(v, i);
                row_negate(vinv, i);
            }
            if (w.at(i + 1, i + 1) < 0) {
                col_negate(w, i + 1);
                col_negate(v, i + 1);
                row_negate(vinv, i + 1);
            }
        }
    }

    SmithTriple t;
    IntVec d(n);
    for (int k = 0; k < n; ++k)
        d[k] = w.at(k, k);
    t.S = SmithForm(std::move(d));
    t.U0 = u.freeze();
    t.V0 = v.freeze();
    t.V0inv = vinv.freeze();
    return t;
}

} // namespace snf
