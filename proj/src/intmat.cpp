#include "snf/intmat.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "snf/rng.hpp"

namespace snf {

// ---------------------------------------------------------------------------
// Scalar helpers
// ---------------------------------------------------------------------------

int length_bits(const Int& a) {
    // mpz_sizeinbase returns 1 for zero, which matches length(0) = 1.
    return static_cast<int>(mpz_sizeinbase(a.get_mpz_t(), 2));
}

static void check_modulus(const Int& m) {
    if (m <= 0)
        throw precondition_error("modulus must be positive");
}

Int rem(const Int& a, const Int& m) {
    check_modulus(m);
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int rem_star(const Int& a, const Int& m) {
    check_modulus(m);
    Int r;
    mpz_tdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Int quo_star(const Int& a, const Int& m) {
    check_modulus(m);
    Int q;
    mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return q;
}

Int rem_symmetric(const Int& a, const Int& m) {
    check_modulus(m);
    Int r = rem(a, m);
    // Shift (m/2, m) down so the range becomes (-m/2, m/2].
    if (2 * r > m)
        r -= m;
    return r;
}

Int root_ceil(const Int& a, unsigned long n) {
    if (a < 0)
        throw precondition_error("root_ceil expects a nonnegative argument");
    Int r;
    mpz_root(r.get_mpz_t(), a.get_mpz_t(), n); // truncated n-th root
    Int p;
    mpz_pow_ui(p.get_mpz_t(), r.get_mpz_t(), n);
    if (p < a)
        ++r;
    return r;
}

// ---------------------------------------------------------------------------
// MatBuf / IntMat
// ---------------------------------------------------------------------------

MatBuf::MatBuf(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
        throw dimension_error("negative matrix dimension");
    e_.resize(static_cast<size_t>(rows) * cols);
}

IntMat MatBuf::freeze() {
    IntMat m;
    m.rows_ = rows_;
    m.cols_ = cols_;
    m.e_ = std::move(e_);
    rows_ = cols_ = 0;
    e_.clear();
    return m;
}

IntMat IntMat::identity(int n) {
    MatBuf b(n, n);
    for (int i = 0; i < n; ++i)
        b.at(i, i) = 1;
    return b.freeze();
}

IntMat IntMat::zero(int rows, int cols) {
    return MatBuf(rows, cols).freeze();
}

IntMat IntMat::from_rows(std::initializer_list<std::initializer_list<long long>> rows) {
    int n = static_cast<int>(rows.size());
    int m = n > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    MatBuf b(n, m);
    int i = 0;
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != m)
            throw dimension_error("ragged rows in matrix literal");
        int j = 0;
        for (long long v : r)
            b.at(i, j++) = Int(static_cast<long>(v)); // long is 64-bit on this platform
        ++i;
    }
    return b.freeze();
}

IntMat IntMat::from_vec(const IntVec& v) {
    MatBuf b(static_cast<int>(v.size()), 1);
    for (size_t i = 0; i < v.size(); ++i)
        b.at(static_cast<int>(i), 0) = v[i];
    return b.freeze();
}

IntMat IntMat::diagonal(const IntVec& d) {
    int n = static_cast<int>(d.size());
    MatBuf b(n, n);
    for (int i = 0; i < n; ++i)
        b.at(i, i) = d[i];
    return b.freeze();
}

IntVec IntMat::col(int j) const {
    IntVec v(rows_);
    for (int i = 0; i < rows_; ++i)
        v[i] = at(i, j);
    return v;
}

IntVec IntMat::row(int i) const {
    IntVec v(cols_);
    for (int j = 0; j < cols_; ++j)
        v[j] = at(i, j);
    return v;
}

IntMat IntMat::with_col(int j, const IntVec& v) const {
    if (static_cast<int>(v.size()) != rows_)
        throw dimension_error("with_col: wrong column height");
    MatBuf b = thaw();
    for (int i = 0; i < rows_; ++i)
        b.at(i, j) = v[i];
    return b.freeze();
}

IntMat IntMat::block(int i0, int j0, int nrows, int ncols) const {
    if (i0 < 0 || j0 < 0 || i0 + nrows > rows_ || j0 + ncols > cols_)
        throw dimension_error("block out of range");
    MatBuf b(nrows, ncols);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j)
            b.at(i, j) = at(i0 + i, j0 + j);
    return b.freeze();
}

MatBuf IntMat::thaw() const {
    MatBuf b(rows_, cols_);
    b.e_ = e_;
    return b;
}

bool operator==(const IntMat& a, const IntMat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
}

IntMat transpose(const IntMat& a) {
    MatBuf b(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            b.at(j, i) = a.at(i, j);
    return b.freeze();
}

static void check_same_shape(const IntMat& a, const IntMat& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw dimension_error(std::string(what) + ": shape mismatch");
}

IntMat add(const IntMat& a, const IntMat& b) {
    check_same_shape(a, b, "add");
    MatBuf r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = a.at(i, j) + b.at(i, j);
    return r.freeze();
}

IntMat sub(const IntMat& a, const IntMat& b) {
    check_same_shape(a, b, "sub");
    MatBuf r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = a.at(i, j) - b.at(i, j);
    return r.freeze();
}

IntMat negate(const IntMat& a) {
    MatBuf r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = -a.at(i, j);
    return r.freeze();
}

IntMat scale(const IntMat& a, const Int& c) {
    MatBuf r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = c * a.at(i, j);
    return r.freeze();
}

IntMat matmul(const IntMat& a, const IntMat& b) {
    if (a.cols() != b.rows())
        throw dimension_error("matmul: inner dimensions disagree");
    const int n = a.rows(), k = a.cols(), m = b.cols();
    MatBuf r(n, m);
    const long long work = 1LL * n * k * m;
#pragma omp parallel for collapse(2) schedule(static) if (work >= 4096)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            Int acc = 0;
            for (int t = 0; t < k; ++t)
                acc += a.at(i, t) * b.at(t, j);
            r.at(i, j) = acc;
        }
    }
    return r.freeze();
}

IntVec matvec(const IntMat& a, const IntVec& v) {
    if (a.cols() != static_cast<int>(v.size()))
        throw dimension_error("matvec: inner dimensions disagree");
    IntVec r(a.rows());
    const long long work = 1LL * a.rows() * a.cols();
#pragma omp parallel for schedule(static) if (work >= 4096)
    for (int i = 0; i < a.rows(); ++i) {
        Int acc = 0;
        for (int j = 0; j < a.cols(); ++j)
            acc += a.at(i, j) * v[j];
        r[i] = acc;
    }
    return r;
}

Int max_norm(const IntMat& a) {
    Int m = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            Int v = abs(a.at(i, j));
            if (v > m)
                m = v;
        }
    return m;
}

int length_bits(const IntMat& a) {
    return length_bits(max_norm(a));
}

int col_length_bits(const IntMat& a, int j) {
    Int m = 0;
    for (int i = 0; i < a.rows(); ++i) {
        Int v = abs(a.at(i, j));
        if (v > m)
            m = v;
    }
    return length_bits(m);
}

// ---------------------------------------------------------------------------
// SmithForm and modular reductions
// ---------------------------------------------------------------------------

Int SmithForm::det() const {
    Int p = 1;
    for (const Int& d : diag)
        p *= d;
    return p;
}

bool SmithForm::valid_chain() const {
    for (size_t i = 0; i < diag.size(); ++i) {
        if (diag[i] <= 0)
            return false;
        if (i > 0 && !mpz_divisible_p(diag[i].get_mpz_t(), diag[i - 1].get_mpz_t()))
            return false;
    }
    return true;
}

SmithForm SmithForm::scaled_down(const Int& c) const {
    IntVec d(diag.size());
    for (size_t i = 0; i < diag.size(); ++i) {
        if (!mpz_divisible_p(diag[i].get_mpz_t(), c.get_mpz_t()))
            throw precondition_error("scaled_down: invariant factor not divisible");
        d[i] = diag[i] / c;
    }
    return SmithForm(d);
}

IntMat colmod(const IntMat& a, const SmithForm& s) {
    if (s.n() != a.cols())
        throw dimension_error("colmod: Smith form size must match column count");
    MatBuf r(a.rows(), a.cols());
    const long long work = 1LL * a.rows() * a.cols();
#pragma omp parallel for collapse(2) schedule(static) if (work >= 4096)
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = rem(a.at(i, j), s.s(j));
    return r.freeze();
}

IntMat rowmod(const IntMat& a, const SmithForm& s) {
    if (s.n() != a.rows())
        throw dimension_error("rowmod: Smith form size must match row count");
    MatBuf r(a.rows(), a.cols());
    const long long work = 1LL * a.rows() * a.cols();
#pragma omp parallel for collapse(2) schedule(static) if (work >= 4096)
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = rem(a.at(i, j), s.s(i));
    return r.freeze();
}

IntMat mat_mod(const IntMat& a, const Int& x) {
    MatBuf r(a.rows(), a.cols());
    const long long work = 1LL * a.rows() * a.cols();
#pragma omp parallel for collapse(2) schedule(static) if (work >= 4096)
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = rem(a.at(i, j), x);
    return r.freeze();
}

IntMat mat_mod_symmetric(const IntMat& a, const Int& x) {
    MatBuf r(a.rows(), a.cols());
    const long long work = 1LL * a.rows() * a.cols();
#pragma omp parallel for collapse(2) schedule(static) if (work >= 4096)
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = rem_symmetric(a.at(i, j), x);
    return r.freeze();
}

IntMat mat_rem_star(const IntMat& a, const Int& x) {
    MatBuf r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = rem_star(a.at(i, j), x);
    return r.freeze();
}

namespace reference {

IntMat matmul(const IntMat& a, const IntMat& b) {
    if (a.cols() != b.rows())
        throw dimension_error("matmul: inner dimensions disagree");
    MatBuf r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            Int acc = 0;
            for (int t = 0; t < a.cols(); ++t)
                acc += a.at(i, t) * b.at(t, j);
            r.at(i, j) = acc;
        }
    return r.freeze();
}

IntMat colmod(const IntMat& a, const SmithForm& s) {
    if (s.n() != a.cols())
        throw dimension_error("colmod: Smith form size must match column count");
    MatBuf r(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            r.at(i, j) = rem(a.at(i, j), s.s(j));
    return r.freeze();
}

} // namespace reference

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

IntMat parse_matrix(std::istream& in) {
    // Strip comment lines first, then tokenize the rest.
    std::string line, data;
    while (std::getline(in, line)) {
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        data += line;
        data += '\n';
    }
    std::istringstream t(data);
    long long n = 0, m = 0;
    if (!(t >> n >> m))
        throw parse_error("matrix header: expected \"rows cols\"");
    if (n < 1 || m < 1 || n > 1000000 || m > 1000000)
        throw parse_error("matrix header: dimensions out of range");
    MatBuf b(static_cast<int>(n), static_cast<int>(m));
    std::string tok;
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < m; ++j) {
            if (!(t >> tok))
                throw parse_error("matrix body: too few entries");
            try {
                b.at(static_cast<int>(i), static_cast<int>(j)) = Int(tok);
            } catch (const std::invalid_argument&) {
                throw parse_error("matrix body: bad integer \"" + tok + "\"");
            }
        }
    if (t >> tok)
        throw parse_error("matrix body: trailing data \"" + tok + "\"");
    return b.freeze();
}

IntMat parse_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw parse_error("cannot open " + path);
    return parse_matrix(f);
}

void serialize_matrix(std::ostream& out, const IntMat& a) {
    out << a.rows() << ' ' << a.cols() << '\n';
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            if (j)
                out << ' ';
            out << a.at(i, j);
        }
        out << '\n';
    }
}

std::string to_text(const IntMat& a) {
    std::ostringstream s;
    serialize_matrix(s, a);
    return s.str();
}

void write_matrix_file(const std::string& path, const IntMat& a) {
    std::ofstream f(path);
    if (!f)
        throw error("cannot write " + path);
    serialize_matrix(f, a);
}

// ---------------------------------------------------------------------------
// Rng pieces that need GMP
// ---------------------------------------------------------------------------

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0)
        throw precondition_error("Rng::below: bound must be positive");
    if (bound == 1)
        return 0;
    // Power-of-two mask rejection.
    int bits = 64 - __builtin_clzll(bound - 1);
    std::uint64_t mask = (bits == 64) ? ~0ull : ((1ull << bits) - 1);
    for (;;) {
        std::uint64_t v = next_u64() & mask;
        if (v < bound)
            return v;
    }
}

mpz_class Rng::below(const mpz_class& bound) {
    if (bound <= 0)
        throw precondition_error("Rng::below: bound must be positive");
    if (bound == 1)
        return 0;
    mpz_class limit = bound - 1;
    size_t bits = mpz_sizeinbase(limit.get_mpz_t(), 2);
    size_t words = (bits + 63) / 64;
    std::vector<std::uint64_t> buf(words);
    for (;;) {
        for (size_t i = 0; i < words; ++i)
            buf[i] = next_u64();
        // Mask the top word down to the wanted bit count.
        size_t top_bits = bits % 64;
        if (top_bits != 0)
            buf[words - 1] &= (1ull << top_bits) - 1;
        mpz_class v;
        mpz_import(v.get_mpz_t(), words, -1 /*lsw first*/, sizeof(std::uint64_t), 0, 0, buf.data());
        if (v < bound)
            return v;
    }
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2)
        return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0)
            return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    auto mulmod = [n](std::uint64_t a, std::uint64_t b) -> std::uint64_t {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % n);
    };
    auto powmod = [&](std::uint64_t a, std::uint64_t e) -> std::uint64_t {
        std::uint64_t r = 1;
        a %= n;
        while (e) {
            if (e & 1)
                r = mulmod(r, a);
            a = mulmod(a, a);
            e >>= 1;
        }
        return r;
    };
    // This base set is a proven deterministic test below 2^64.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d);
        if (x == 1 || x == n - 1)
            continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness)
            return false;
    }
    return true;
}

} // namespace snf
