#include "snf/massager.hpp"

#include <algorithm>

#include "snf/errors.hpp"
#include "snf/kernel.hpp"

namespace snf {

namespace {

bool is_zero_mat(const IntMat& a) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (a.at(i, j) != 0) return false;
    return true;
}

bool congruent_zero(const IntMat& a, const SmithForm& s) { return is_zero_mat(colmod(a, s)); }

void self_check(const IntMat& a, const SmithMassager& sm) {
    const int n = a.rows();
    if (!congruent_zero(matmul(a, sm.M), sm.S))
        throw integrity_error("smith_massager: A M != 0 (colmod S)");
    if (!congruent_zero(sub(matmul(sm.W, sm.M), IntMat::identity(n)), sm.S))
        throw integrity_error("smith_massager: W M != I (colmod S)");
}

SmithMassager massager_direct(const IntMat& a) {
    const SmithTriple st = smith_classical(a);
    SmithMassager sm;
    sm.S = st.S;
    sm.M = colmod(st.V0, st.S);
    sm.W = st.V0inv;
    return sm;
}

SmithMassager massager_linearized(const IntMat& a) {
    const int n = a.rows();
    const Linearization lin = linearize_columns(a);
    const int k = lin.nbar() - n;
    if (k == 0) return massager_direct(a);

    const SmithTriple st = smith_classical(lin.D);
    for (int i = 0; i < k; ++i)
        if (st.S.s(i) != 1)
            throw integrity_error("smith_massager: linearized Smith form lacks trivial leading block");
    const IntMat md = colmod(st.V0, st.S);
    const RecoveredMassager rec = recover_massager(lin, st.S, md);

    // W for the original matrix: fold the gadget columns of the certificate
    // back through -F^{-1}E before taking the trailing block.
    const IntMat bl = colmode_gadget_map(lin);
    const IntMat w =
        add(st.V0inv.block(k, 0, n, n), matmul(st.V0inv.block(k, n, n, k), bl));
    return {rec.S, rec.M, w};
}

bool columns_are_skewed(const IntMat& a) {
    const int m = a.cols();
    long total = 0, maxlen = 0;
    for (int j = 0; j < m; ++j) {
        const long len = static_cast<long>(col_length_bits(a, j));
        total += len;
        maxlen = std::max(maxlen, len);
    }
    return maxlen * m > 2 * total;
}

// Prime factors of v found by trial division up to 10^6; a leftover
// residual is kept only if it is (a perfect power of) a probable prime.
// Returns the primes found and whether the factorization is complete.
std::pair<std::vector<Int>, bool> factor_probable(Int v) {
    std::vector<Int> primes;
    bool complete = true;
    for (unsigned long p = 2; p <= 1000000 && v > 1; p += (p == 2) ? 1 : 2) {
        if (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
            primes.emplace_back(p);
            while (mpz_divisible_ui_p(v.get_mpz_t(), p))
                mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), p);
        }
        if (mpz_fits_ulong_p(v.get_mpz_t()) && p * p > mpz_get_ui(v.get_mpz_t())) break;
    }
    if (v > 1) {
        // Strip perfect powers so p^k residuals still yield p.
        bool reduced = true;
        while (reduced && mpz_perfect_power_p(v.get_mpz_t())) {
            reduced = false;
            for (unsigned long k = 2; k <= mpz_sizeinbase(v.get_mpz_t(), 2); ++k) {
                Int root, rem;
                mpz_rootrem(root.get_mpz_t(), rem.get_mpz_t(), v.get_mpz_t(), k);
                if (rem == 0) {
                    v = root;
                    reduced = true;
                    break;
                }
            }
        }
        if (mpz_probab_prime_p(v.get_mpz_t(), 40) > 0) {
            primes.push_back(v);
        } else {
            complete = false;
        }
    }
    return {primes, complete};
}

int rank_mod_p(std::vector<Int> rowsdata, int nrows, int ncols, const Int& p) {
    // Straightforward Gauss elimination over Z/p; entries stored row-major.
    auto at = [&](int i, int j) -> Int& { return rowsdata[static_cast<size_t>(i) * ncols + j]; };
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j) at(i, j) = rem(at(i, j), p);
    int rank = 0;
    for (int col = 0; col < ncols && rank < nrows; ++col) {
        int piv = -1;
        for (int i = rank; i < nrows; ++i)
            if (at(i, col) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        for (int j = 0; j < ncols; ++j) std::swap(at(piv, j), at(rank, j));
        Int inv;
        mpz_invert(inv.get_mpz_t(), at(rank, col).get_mpz_t(), p.get_mpz_t());
        for (int i = rank + 1; i < nrows; ++i) {
            if (at(i, col) == 0) continue;
            const Int f = rem(at(i, col) * inv, p);
            for (int j = col; j < ncols; ++j) at(i, j) = rem(at(i, j) - f * at(rank, j), p);
        }
        ++rank;
    }
    return rank;
}

} // namespace

SmithMassager smith_massager(const IntMat& a, MassagerPath path) {
    const int n = a.rows();
    if (a.cols() != n) throw dimension_error("smith_massager: matrix must be square");
    bool linearized = false;
    switch (path) {
        case MassagerPath::direct: linearized = false; break;
        case MassagerPath::linearized: linearized = true; break;
        case MassagerPath::auto_select: linearized = n >= 2 && columns_are_skewed(a); break;
    }
    SmithMassager sm = linearized ? massager_linearized(a) : massager_direct(a);
    self_check(a, sm);
    return sm;
}

MassagerVerdict verify_massager(const IntMat& a, const SmithForm& s, const IntMat& m,
                                const IntMat* w) {
    const int n = a.rows();
    if (a.cols() != n || m.rows() != n || m.cols() != n || s.n() != n) return MassagerVerdict::rejected;
    if (w && (w->rows() != n || w->cols() != n)) return MassagerVerdict::rejected;
    if (!s.valid_chain()) return MassagerVerdict::rejected;
    if (smith_classical(a).S.diag != s.diag) return MassagerVerdict::rejected;
    if (!congruent_zero(matmul(a, m), s)) return MassagerVerdict::rejected;

    if (w) {
        if (!congruent_zero(sub(matmul(*w, m), IntMat::identity(n)), s))
            return MassagerVerdict::rejected;
        return MassagerVerdict::accepted;
    }

    // No certificate: probe unimodularity of M at every prime we can
    // extract from s_n.  For each such p, the trailing i_p columns of M
    // (those with p | s_j) must stay independent mod p.
    if (s.s(n - 1) == 1) return MassagerVerdict::accepted; // A unimodular, M irrelevant
    auto [primes, complete] = factor_probable(s.s(n - 1));
    for (const Int& p : primes) {
        int ip = 0;
        for (int j = 0; j < n; ++j)
            if (mpz_divisible_p(s.s(j).get_mpz_t(), p.get_mpz_t())) ++ip;
        std::vector<Int> sub_cols(static_cast<size_t>(n) * ip);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < ip; ++j)
                sub_cols[static_cast<size_t>(i) * ip + j] = m.at(i, n - ip + j);
        if (rank_mod_p(std::move(sub_cols), n, ip, p) != ip) return MassagerVerdict::rejected;
    }
    return complete ? MassagerVerdict::accepted : MassagerVerdict::accepted_partial;
}

std::pair<IntMat, IntMat> massager_col_op(const SmithForm& s, const IntMat& m, const IntMat& w,
                                          const MassagerColOp& op) {
    const int n = s.n();
    if (m.rows() != n || m.cols() != n || w.rows() != n || w.cols() != n)
        throw dimension_error("massager_col_op: shape mismatch");
    if (op.i < 0 || op.i >= n) throw precondition_error("massager_col_op: column index out of range");

    MatBuf mb = m.thaw();
    MatBuf wb = w.thaw();
    switch (op.kind) {
        case MassagerColOp::Kind::add_si_multiple: {
            if (static_cast<int>(op.u.size()) != n)
                throw dimension_error("massager_col_op: vector length mismatch");
            for (int r = 0; r < n; ++r) mb.at(r, op.i) += s.s(op.i) * op.u[r];
            break;
        }
        case MassagerColOp::Kind::add_col_multiple: {
            if (op.j <= op.i || op.j >= n)
                throw precondition_error("massager_col_op: requires i < j within range");
            for (int r = 0; r < n; ++r) mb.at(r, op.i) += op.c * m.at(r, op.j);
            for (int cc = 0; cc < n; ++cc) wb.at(op.j, cc) -= op.c * w.at(op.i, cc);
            break;
        }
        case MassagerColOp::Kind::scale_unit: {
            Int g;
            mpz_gcd(g.get_mpz_t(), op.c.get_mpz_t(), s.s(op.i).get_mpz_t());
            if (g != 1) throw precondition_error("massager_col_op: scale factor not a unit mod s_i");
            Int cinv;
            mpz_invert(cinv.get_mpz_t(), op.c.get_mpz_t(), s.s(op.i).get_mpz_t());
            for (int r = 0; r < n; ++r) mb.at(r, op.i) *= op.c;
            for (int cc = 0; cc < n; ++cc) wb.at(op.i, cc) *= cinv;
            break;
        }
    }
    for (int r = 0; r < n; ++r) mb.at(r, op.i) = rem(mb.at(r, op.i), s.s(op.i));
    return {mb.freeze(), wb.freeze()};
}

bool in_row_lattice(const SmithForm& s, const IntMat& m, const IntVec& v) {
    const int n = s.n();
    if (m.rows() != n || m.cols() != n || static_cast<int>(v.size()) != n)
        throw dimension_error("in_row_lattice: shape mismatch");
    for (int j = 0; j < n; ++j) {
        Int r = 0;
        for (int i = 0; i < n; ++i) r += v[i] * m.at(i, j);
        if (rem(r, s.s(j)) != 0) return false;
    }
    return true;
}

Int denominator_of(const SmithForm& s, const IntMat& m, const IntVec& v) {
    const int n = s.n();
    if (m.rows() != n || m.cols() != n || static_cast<int>(v.size()) != n)
        throw dimension_error("denominator_of: shape mismatch");
    Int den = 1;
    for (int j = 0; j < n; ++j) {
        Int r = 0;
        for (int i = 0; i < n; ++i) r += v[i] * m.at(i, j);
        Int g;
        mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), s.s(j).get_mpz_t());
        const Int t = s.s(j) / g;
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.get_mpz_t());
    }
    return den;
}

bool is_left_equivalent(const IntMat& h, const SmithForm& s, const IntMat& m) {
    const int n = s.n();
    if (h.rows() != n || h.cols() != n || m.rows() != n || m.cols() != n)
        throw dimension_error("is_left_equivalent: shape mismatch");
    return abs(det_exact(h)) == s.det() && congruent_zero(matmul(h, m), s);
}

} // namespace snf
