#include "snf/lifting.hpp"

#include <cmath>

#include "snf/kernel.hpp"

namespace snf {

namespace {

Int pow_int(const Int& base, int e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

// Hadamard-style bound C = n^{ceil(n/2)} ||A||^n (fractional exponents
// rounded up, see comparison policy below).
Int hadamard_bound(int n, const Int& norm) {
    Int c = pow_int(Int(n), (n + 1) / 2) * pow_int(norm == 0 ? Int(1) : norm, n);
    if (c < 2)
        c = 2;
    return c;
}

// Gauss-Jordan inverse mod a word-sized prime.  Returns false when the
// matrix is singular mod p.
bool inverse_mod_p(const IntMat& a, const Int& p, IntMat* out) {
    const int n = a.rows();
    MatBuf w = mat_mod(a, p).thaw();
    MatBuf inv = IntMat::identity(n).thaw();
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        for (int i = k; i < n; ++i)
            if (w.at(i, k) != 0) {
                piv = i;
                break;
            }
        if (piv < 0)
            return false;
        if (piv != k)
            for (int j = 0; j < n; ++j) {
                swap(w.at(k, j), w.at(piv, j));
                swap(inv.at(k, j), inv.at(piv, j));
            }
        Int pinv;
        if (!mpz_invert(pinv.get_mpz_t(), w.at(k, k).get_mpz_t(), p.get_mpz_t()))
            return false;
        for (int j = 0; j < n; ++j) {
            w.at(k, j) = rem(w.at(k, j) * pinv, p);
            inv.at(k, j) = rem(inv.at(k, j) * pinv, p);
        }
        for (int i = 0; i < n; ++i) {
            if (i == k || w.at(i, k) == 0)
                continue;
            Int f = w.at(i, k);
            for (int j = 0; j < n; ++j) {
                w.at(i, j) = rem(w.at(i, j) - f * w.at(k, j), p);
                inv.at(i, j) = rem(inv.at(i, j) - f * inv.at(k, j), p);
            }
        }
    }
    if (out)
        *out = inv.freeze();
    return true;
}

} // namespace

int lifting_exponent_for(const IntMat& a, std::uint64_t p) {
    if (p < 3)
        throw precondition_error("lifting prime must be odd and >= 3");
    const int n = a.rows();
    Int norm = max_norm(a);
    // X >= max(10000, ceil(3.61 n^2 ||A||)): scale by 100 to stay integral.
    Int target = (Int(361) * n * n * norm + 99) / 100;
    if (target < 10000)
        target = 10000;
    Int x = p;
    int e = 1;
    while (x < target) {
        x *= Int(static_cast<unsigned long>(p));
        ++e;
    }
    return e;
}

IntMat inverse_mod_X(const IntMat& a, std::uint64_t p, int e) {
    if (a.rows() != a.cols())
        throw dimension_error("inverse_mod_X: matrix must be square");
    if (e < 1)
        throw precondition_error("inverse_mod_X: exponent must be >= 1");
    Int pz(static_cast<unsigned long>(p));
    IntMat b;
    if (!inverse_mod_p(a, pz, &b))
        throw precondition_error("inverse_mod_X: matrix not invertible mod p");
    Int target = pow_int(pz, e);
    Int m = pz;
    // Newton doubling: if A B = I (mod m) then B(2I - AB) works mod m^2.
    while (m < target) {
        Int m2 = m * m;
        if (m2 > target)
            m2 = target;
        IntMat ab = mat_mod(matmul(a, b), m2);
        MatBuf t = negate(ab).thaw();
        for (int i = 0; i < t.rows(); ++i)
            t.at(i, i) += 2;
        b = mat_mod(matmul(b, t.freeze()), m2);
        m = m2;
    }
    return b;
}

static LiftingContext finish_context(const IntMat& a, std::uint64_t p) {
    LiftingContext ctx;
    ctx.A = a;
    ctx.p = p;
    ctx.e = lifting_exponent_for(a, p);
    ctx.X = pow_int(Int(static_cast<unsigned long>(p)), ctx.e);
    ctx.invA_modX = inverse_mod_X(a, p, ctx.e);
    ctx.normA = max_norm(a);
    return ctx;
}

LiftingContext make_lifting_context(const IntMat& a, std::uint64_t p) {
    if (a.rows() != a.cols())
        throw dimension_error("lifting: matrix must be square");
    if (!is_prime_u64(p) || p < 3)
        throw precondition_error("lifting: p must be an odd prime");
    if (!inverse_mod_p(a, Int(static_cast<unsigned long>(p)), nullptr))
        throw precondition_error("lifting: det A vanishes mod p");
    return finish_context(a, p);
}

LiftingContext choose_lifting_modulus(const IntMat& a, Rng& rng, int max_retries) {
    if (a.rows() != a.cols())
        throw dimension_error("lifting: matrix must be square");
    if (a.rows() == 0)
        throw dimension_error("lifting: empty matrix");
    const int n = a.rows();
    Int c = hadamard_bound(n, max_norm(a));
    // ln C from the bit length; the log only shapes the sampling window.
    double lnc = static_cast<double>(mpz_sizeinbase(c.get_mpz_t(), 2)) * 0.6931471805599453;
    double lo_d = 6.0 * lnc, hi_d = 12.0 * lnc;
    std::uint64_t lo = lo_d < 3.0 ? 3 : static_cast<std::uint64_t>(lo_d);
    std::uint64_t hi = static_cast<std::uint64_t>(hi_d);
    if (hi < lo + 64)
        hi = lo + 64; // keep a handful of candidates for tiny inputs
    int fails = 0;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        // One attempt: sample odd candidates until a proven prime comes up,
        // then insist that A stays invertible mod p.
        std::uint64_t p = 0;
        for (int tries = 0; tries < 4096; ++tries) {
            std::uint64_t cand = lo + rng.below(hi - lo + 1);
            if ((cand & 1) == 0)
                continue;
            if (is_prime_u64(cand)) {
                p = cand;
                break;
            }
        }
        if (p == 0) {
            ++fails;
            continue;
        }
        if (!inverse_mod_p(a, Int(static_cast<unsigned long>(p)), nullptr)) {
            ++fails; // p divides det A -- or A is singular outright
            continue;
        }
        return finish_context(a, p);
    }
    if (det_exact(a) == 0)
        throw singular_error("lifting: matrix is singular");
    throw retries_exhausted("lifting: no usable prime found", 0, fails);
}

// ---------------------------------------------------------------------------
// High-order residue
// ---------------------------------------------------------------------------

HighOrderResidue high_order_residue(const LiftingContext& ctx, int k) {
    if (k < 1)
        throw precondition_error("high_order_residue: k must be >= 1");
    const Int xk = pow_int(ctx.X, k);
    IntMat dfull = inverse_mod_X(ctx.A, ctx.p, ctx.e * k);
    HighOrderResidue h;
    h.k = k;
    h.D = mat_mod_symmetric(dfull, xk);
    // R = (I - A D) / X^k, exact by construction.
    IntMat ad = matmul(ctx.A, h.D);
    MatBuf r(ad.rows(), ad.cols());
    for (int i = 0; i < ad.rows(); ++i)
        for (int j = 0; j < ad.cols(); ++j) {
            Int t = (i == j ? Int(1) - ad.at(i, j) : Int(-ad.at(i, j)));
            if (!mpz_divisible_p(t.get_mpz_t(), xk.get_mpz_t()))
                throw integrity_error("high_order_residue: residue not divisible by X^k");
            r.at(i, j) = t / xk;
        }
    h.R = r.freeze();
    // ||R|| <= 0.6 n ||A||  (5 ||R|| <= 3 n ||A|| exactly).
    if (5 * max_norm(h.R) > 3 * ctx.A.rows() * ctx.normA)
        throw integrity_error("high_order_residue: residue norm out of bounds");
    return h;
}

// ---------------------------------------------------------------------------
// X-adic arithmetic
// ---------------------------------------------------------------------------

XadicSeries to_xadic(const IntMat& b, const Int& x, int d) {
    if (x < 2)
        throw precondition_error("to_xadic: X must be >= 2");
    if (d < 1)
        throw precondition_error("to_xadic: d must be >= 1");
    std::vector<MatBuf> coeff;
    coeff.reserve(d);
    for (int t = 0; t < d; ++t)
        coeff.emplace_back(b.rows(), b.cols());
    const Int xd = pow_int(x, d);
    const long long work = 1LL * b.rows() * b.cols() * d;
#pragma omp parallel for collapse(2) schedule(static) if (work >= 4096)
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            Int v = rem(b.at(i, j), xd);
            for (int t = 0; t < d; ++t) {
                Int digit;
                mpz_fdiv_qr(v.get_mpz_t(), digit.get_mpz_t(), v.get_mpz_t(), x.get_mpz_t());
                coeff[t].at(i, j) = digit;
            }
        }
    XadicSeries s;
    s.reserve(d);
    for (auto& c : coeff)
        s.push_back(c.freeze());
    return s;
}

IntMat from_xadic(const XadicSeries& series, const Int& x) {
    if (series.empty())
        throw precondition_error("from_xadic: empty series");
    const int n = series[0].rows(), m = series[0].cols();
    MatBuf r(n, m);
    const long long work = 1LL * n * m * static_cast<long long>(series.size());
#pragma omp parallel for collapse(2) schedule(static) if (work >= 4096)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            Int acc = 0;
            for (size_t t = series.size(); t-- > 0;)
                acc = acc * x + series[t].at(i, j);
            r.at(i, j) = acc;
        }
    return r.freeze();
}

XadicSeries xadic_mul(const IntMat& c, const XadicSeries& b, const Int& x, int d) {
    if (max_norm(c) >= x)
        throw precondition_error("xadic_mul: ||C|| must be < X");
    if (b.empty())
        throw precondition_error("xadic_mul: empty operand");
    const int n = c.rows(), m = b[0].cols();
    XadicSeries out;
    out.reserve(d);
    IntMat carry = IntMat::zero(n, m);
    for (int t = 0; t < d; ++t) {
        IntMat prod = (t < static_cast<int>(b.size())) ? matmul(c, b[t]) : IntMat::zero(n, m);
        IntMat total = add(prod, carry);
        MatBuf digits(n, m);
        MatBuf next(n, m);
        const long long work = 1LL * n * m;
#pragma omp parallel for collapse(2) schedule(static) if (work >= 4096)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                Int q, r;
                mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), total.at(i, j).get_mpz_t(), x.get_mpz_t());
                digits.at(i, j) = r;
                next.at(i, j) = q;
            }
        out.push_back(digits.freeze());
        carry = next.freeze();
    }
    return out;
}

// ---------------------------------------------------------------------------
// solve_mod
// ---------------------------------------------------------------------------

IntMat solve_mod(const LiftingContext& ctx, const IntMat& b, int d) {
    if (b.rows() != ctx.A.rows())
        throw dimension_error("solve_mod: row count mismatch");
    if (d < 1)
        throw precondition_error("solve_mod: d must be >= 1");
    const int n = ctx.A.rows(), m = b.cols();
    // Lift the inverse to precision X^d, then convolve X-adic digit matrices
    // of the inverse with the digits of B, carrying as we go.
    IntMat invd = inverse_mod_X(ctx.A, ctx.p, ctx.e * d);
    XadicSeries dcoef = to_xadic(invd, ctx.X, d);
    XadicSeries bcoef = to_xadic(b, ctx.X, d);
    XadicSeries out;
    out.reserve(d);
    IntMat carry = IntMat::zero(n, m);
    for (int t = 0; t < d; ++t) {
        IntMat total = carry;
        for (int i = 0; i <= t; ++i)
            total = add(total, matmul(dcoef[i], bcoef[t - i]));
        MatBuf digits(n, m);
        MatBuf next(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                Int q, r;
                mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), total.at(i, j).get_mpz_t(), ctx.X.get_mpz_t());
                digits.at(i, j) = r;
                next.at(i, j) = q;
            }
        out.push_back(digits.freeze());
        carry = next.freeze();
    }
    return from_xadic(out, ctx.X);
}

// ---------------------------------------------------------------------------
// Integrality certification
// ---------------------------------------------------------------------------

CertifyResult integrality_certify(const LiftingContext& ctx, const Int& s, const IntMat& b) {
    if (s <= 0)
        throw precondition_error("integrality_certify: s must be positive");
    if (b.rows() != ctx.A.rows())
        throw dimension_error("integrality_certify: row count mismatch");
    const int n = ctx.A.rows();
    Int normB = max_norm(b);
    if (normB == 0) {
        CertifyResult r;
        r.integral = true;
        r.value = IntMat::zero(b.rows(), b.cols());
        return r;
    }
    // Step 1: h minimal with X^h > 2 s n^{ceil(n/2)} ||A||^{n-1} ||B||.
    Int target_h = 2 * s * pow_int(Int(n), (n + 1) / 2) *
                   pow_int(ctx.normA == 0 ? Int(1) : ctx.normA, n - 1) * normB;
    int h = 1;
    Int xh = ctx.X;
    while (xh <= target_h) {
        xh *= ctx.X;
        ++h;
    }
    HighOrderResidue hor = high_order_residue(ctx, h);
    // Step 2: l minimal with X^l > 1.2 s n^2 ||A|| ||B||  (times 5 for exactness).
    Int target_l6 = 6 * s * n * n * (ctx.normA == 0 ? Int(1) : ctx.normA) * normB;
    int l = 1;
    Int xl = ctx.X;
    while (5 * xl <= target_l6) {
        xl *= ctx.X;
        ++l;
    }
    IntMat srb = scale(matmul(hor.R, b), s);
    IntMat y = solve_mod(ctx, srb, l);
    IntMat c = mat_mod_symmetric(y, xl);
    // Step 3: accept iff ||C|| < 0.6 s n ||B||  (5||C|| < 3 s n ||B||).
    CertifyResult r;
    if (5 * max_norm(c) < 3 * s * n * normB) {
        r.integral = true;
        r.value = mat_mod(scale(c, xh), s);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Unimodular inverse via lifting
// ---------------------------------------------------------------------------

IntMat inverse_unimodular(const IntMat& u) {
    if (u.rows() != u.cols())
        throw dimension_error("inverse_unimodular: matrix must be square");
    const int n = u.rows();
    if (n == 0)
        return u;
    if (n == 1) {
        if (abs(u.at(0, 0)) != 1)
            throw precondition_error("inverse_unimodular: matrix is not unimodular");
        return u;
    }
    // The inverse of a unimodular matrix is +-adjugate; bound its entries by
    // Hadamard on (n-1)-minors, then lift past twice that bound.
    Int norm = max_norm(u);
    Int bound = pow_int(Int(n - 1), n / 2) * pow_int(norm == 0 ? Int(1) : norm, n - 1);
    // A unimodular matrix is invertible mod every prime, so a deterministic
    // prime works; scanning keeps this routine reproducible.
    std::uint64_t p = 10007;
    while (!is_prime_u64(p))
        p += 2;
    LiftingContext ctx = make_lifting_context(u, p);
    int k = 1;
    Int xk = ctx.X;
    while (xk <= 2 * bound) {
        xk *= ctx.X;
        ++k;
    }
    HighOrderResidue hor = high_order_residue(ctx, k);
    IntMat inv = hor.D; // symmetric residue equals the true inverse here
    if (matmul(u, inv) != IntMat::identity(n))
        throw precondition_error("inverse_unimodular: matrix is not unimodular");
    return inv;
}

} // namespace snf
