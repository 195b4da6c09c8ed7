#include "snf/linearize.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "snf/errors.hpp"

namespace snf {

namespace {

Int pow2(int k) {
    Int r = 1;
    mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
    return r;
}

// Core builder shared by all modes: expand each column j of a into a
// residue column plus e[j] high-order digit columns compensated by a
// -2^d shift gadget.  e[j] need not be minimal; the last digit of an
// over-long column simply absorbs the remaining quotient.
IntMat linearize_columns_with(const IntMat& a, int d, const std::vector<int>& e) {
    const int n = a.rows(), m = a.cols();
    if (static_cast<int>(e.size()) != m)
        throw dimension_error("linearize: e vector does not match column count");
    std::vector<int> gs(m + 1, 0); // gadget block offsets
    for (int j = 0; j < m; ++j) {
        if (e[j] < 0) throw precondition_error("linearize: negative expansion length");
        gs[j + 1] = gs[j] + e[j];
    }
    const int total = gs[m];
    const Int shift = pow2(d);

    MatBuf buf(n + total, m + total);
    for (int j = 0; j < m; ++j) {
        const IntMat col = a.block(0, j, n, 1);
        if (e[j] == 0) {
            for (int i = 0; i < n; ++i) buf.at(i, j) = col.at(i, 0);
            continue;
        }
        for (int i = 0; i < n; ++i) buf.at(i, j) = rem_star(col.at(i, 0), shift);
        const IntMat digits = column_expansion(col, e[j], d);
        for (int t = 0; t < e[j]; ++t)
            for (int i = 0; i < n; ++i) buf.at(i, m + gs[j] + t) = digits.at(i, t);
        buf.at(n + gs[j], j) = -shift;
        for (int t = 0; t < e[j]; ++t) {
            buf.at(n + gs[j] + t, m + gs[j] + t) = 1;
            if (t > 0) buf.at(n + gs[j] + t, m + gs[j] + t - 1) = -shift;
        }
    }
    return buf.freeze();
}

void check_norm(const IntMat& d_mat, int d) {
    if (max_norm(d_mat) > pow2(d))
        throw integrity_error("linearize: expanded matrix exceeds its digit bound");
}

int perm_sign(const std::vector<int>& p) {
    int inv = 0;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return (inv % 2 == 0) ? 1 : -1;
}

} // namespace

IntMat column_expansion(const IntMat& v, int e, int d) {
    if (v.cols() != 1) throw dimension_error("column_expansion: expected a column vector");
    if (e < 0 || d < 1) throw precondition_error("column_expansion: e >= 0 and d >= 1 required");
    const int k = v.rows();
    MatBuf buf(k, e);
    for (int i = 0; i < k; ++i) {
        Int q;
        mpz_tdiv_q_2exp(q.get_mpz_t(), v.at(i, 0).get_mpz_t(), static_cast<mp_bitcnt_t>(d));
        for (int t = 0; t < e; ++t) {
            if (t + 1 == e) {
                buf.at(i, t) = q; // final digit keeps whatever is left
            } else {
                mpz_tdiv_r_2exp(buf.at(i, t).get_mpz_t(), q.get_mpz_t(),
                                static_cast<mp_bitcnt_t>(d));
                mpz_tdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), static_cast<mp_bitcnt_t>(d));
            }
        }
    }
    return buf.freeze();
}

Linearization linearize_columns(const IntMat& a) {
    const int n = a.rows(), m = a.cols();
    long total = 0;
    std::vector<int> lens(m);
    for (int j = 0; j < m; ++j) {
        lens[j] = static_cast<int>(col_length_bits(a, j));
        total += lens[j];
    }
    const int d = static_cast<int>((total + m - 1) / m);
    std::vector<int> e(m);
    for (int j = 0; j < m; ++j) e[j] = (lens[j] - 1) / d;

    Linearization lin;
    lin.mode = LinMode::columns;
    lin.n = n;
    lin.m = m;
    lin.d = d;
    lin.ebar = e;
    lin.D = linearize_columns_with(a, d, e);
    if (lin.nbar() >= n + m || lin.mbar() >= 2 * m)
        throw integrity_error("linearize_columns: dimension bound violated");
    check_norm(lin.D, d);
    return lin;
}

Linearization linearize_rows(const IntMat& a) {
    Linearization t = linearize_columns(transpose(a));
    Linearization lin;
    lin.mode = LinMode::rows;
    lin.n = a.rows();
    lin.m = a.cols();
    lin.d = t.d;
    lin.ebar = t.ebar; // one entry per row of a
    lin.D = transpose(t.D);
    return lin;
}

Linearization linearize_permutation(const IntMat& a) {
    const int n = a.rows();
    if (a.cols() != n) throw dimension_error("linearize_permutation: matrix must be square");

    // Greedy assignment: repeatedly take the largest-magnitude entry whose
    // row and column are both still free and pin it to the next diagonal
    // position.  Ties break by (row, col) for determinism.
    std::vector<std::tuple<Int, int, int>> entries;
    entries.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) entries.emplace_back(abs(a.at(i, j)), i, j);
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
        if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
        if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) < std::get<1>(y);
        return std::get<2>(x) < std::get<2>(y);
    });
    std::vector<int> rho, gamma;
    std::vector<char> row_used(n, 0), col_used(n, 0);
    for (const auto& [mag, i, j] : entries) {
        if (row_used[i] || col_used[j]) continue;
        row_used[i] = col_used[j] = 1;
        rho.push_back(i);
        gamma.push_back(j);
        if (static_cast<int>(rho.size()) == n) break;
    }
    if (static_cast<int>(rho.size()) != n)
        throw integrity_error("linearize_permutation: assignment incomplete");

    MatBuf pb(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pb.at(i, j) = a.at(rho[i], gamma[j]);
    // An odd permutation pair would flip the determinant.  Negating the last
    // row restores it without touching any bit length, so every size bound
    // below is unaffected; principal_submatrix undoes the sign.
    if (perm_sign(rho) * perm_sign(gamma) < 0)
        for (int j = 0; j < n; ++j) pb.at(n - 1, j) = -pb.at(n - 1, j);
    const IntMat aperm = pb.freeze();

    long total = 0;
    std::vector<int> dlen(n);
    for (int k = 0; k < n; ++k) {
        dlen[k] = static_cast<int>(length_bits(aperm.at(k, k)));
        total += dlen[k];
    }
    const int d = static_cast<int>((total + n - 1) / n);
    std::vector<int> e(n);
    for (int k = 0; k < n; ++k) e[k] = (dlen[k] - 1) / d;

    // Column pass first, then the same expansion applied to the rows of the
    // intermediate matrix (gadget rows get e = 0 and pass through intact).
    const IntMat pass1 = linearize_columns_with(aperm, d, e);
    std::vector<int> e2 = e;
    e2.resize(pass1.rows(), 0);
    const IntMat d_mat = transpose(linearize_columns_with(transpose(pass1), d, e2));

    Linearization lin;
    lin.mode = LinMode::permutation;
    lin.n = n;
    lin.m = n;
    lin.d = d;
    lin.ebar = e;
    lin.row_perm = rho;
    lin.col_perm = gamma;
    lin.D = d_mat;
    if (lin.nbar() >= 3 * n) throw integrity_error("linearize_permutation: dimension bound violated");
    check_norm(lin.D, d);
    return lin;
}

IntMat principal_submatrix(const Linearization& lin, const IntMat& b) {
    if (b.rows() != lin.nbar() || b.cols() != lin.nbar())
        throw dimension_error("principal_submatrix: matrix does not match linearization");
    const int n = lin.n;
    const IntMat p = b.block(0, 0, n, n);
    if (lin.mode != LinMode::permutation) return p;

    // Adjugate orientation: the linearized matrix was built from N P A Q,
    // where P, Q reorder rows/columns and N negates the last row iff the
    // permutation pair is odd.  adj(N P A Q) = adj(Q) adj(A) adj(N P), and the
    // sign of det(N P Q) cancels against N, leaving a single flip in the
    // column that maps back through the negated row.
    const int sgn = perm_sign(lin.row_perm) * perm_sign(lin.col_perm);
    MatBuf buf(n, n);
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
            buf.at(lin.col_perm[l], lin.row_perm[k]) = p.at(l, k);
            if (sgn < 0 && k == n - 1) buf.at(lin.col_perm[l], lin.row_perm[k]) *= -1;
        }
    return buf.freeze();
}

RecoveredMassager recover_massager(const Linearization& lin, const SmithForm& sd,
                                   const IntMat& md) {
    if (lin.n != lin.m)
        throw precondition_error("recover_massager: original matrix must be square");
    const int nb = lin.nbar(), n = lin.n, k = nb - n;
    if (sd.n() != nb || md.rows() != nb || md.cols() != nb)
        throw dimension_error("recover_massager: massager does not match linearization");
    for (int i = 0; i < k; ++i)
        if (sd.s(i) != 1)
            throw precondition_error("recover_massager: leading invariant factors are not trivial");

    SmithForm s;
    s.diag.assign(sd.diag.begin() + k, sd.diag.end());
    const IntMat m1 = md.block(0, k, n, n);
    if (lin.mode != LinMode::permutation) return {s, m1};

    MatBuf buf(n, n);
    for (int t = 0; t < n; ++t)
        for (int j = 0; j < n; ++j) buf.at(lin.col_perm[t], j) = m1.at(t, j);
    return {s, buf.freeze()};
}

IntMat colmode_gadget_map(const Linearization& lin) {
    if (lin.mode != LinMode::columns)
        throw precondition_error("colmode_gadget_map: columns-mode linearization required");
    const int m = lin.m, total = lin.nbar() - lin.n;
    MatBuf buf(total, m);
    int gs = 0;
    for (int j = 0; j < m; ++j) {
        for (int t = 0; t < lin.ebar[j]; ++t) buf.at(gs + t, j) = pow2((t + 1) * lin.d);
        gs += lin.ebar[j];
    }
    return buf.freeze();
}

} // namespace snf
