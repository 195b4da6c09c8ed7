#pragma once

#include <gmpxx.h>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

#include "snf/errors.hpp"

namespace snf {

using Int = mpz_class;
using IntVec = std::vector<Int>;

// ---------------------------------------------------------------------------
// Scalar helpers
// ---------------------------------------------------------------------------

// Bit length of |a|; length(0) = 1.
int length_bits(const Int& a);

// Floor remainder, in [0, m).  m > 0.
Int rem(const Int& a, const Int& m);

// Sign-split remainder: Rem*(a, m) = Rem(a+, m) - Rem(a-, m).  Same sign as a
// (or zero), |Rem*| < m.  Matches truncated division.
Int rem_star(const Int& a, const Int& m);

// Matching quotient: a = quo_star(a, m) * m + rem_star(a, m).
Int quo_star(const Int& a, const Int& m);

// Symmetric range representative in (-m/2, m/2].
Int rem_symmetric(const Int& a, const Int& m);

// Ceiling of the integer n-th root.
Int root_ceil(const Int& a, unsigned long n);

// ---------------------------------------------------------------------------
// Dense integer matrix
// ---------------------------------------------------------------------------

class IntMat;

// Mutable staging buffer.  All construction funnels through here; an IntMat
// itself is immutable once frozen.
class MatBuf {
public:
    MatBuf(int rows, int cols);
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Int& at(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
    const Int& at(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }
    IntMat freeze();

private:
    friend class IntMat;
    int rows_, cols_;
    std::vector<Int> e_;
};

class IntMat {
public:
    IntMat() : rows_(0), cols_(0) {}

    static IntMat identity(int n);
    static IntMat zero(int rows, int cols);
    // Convenience for literals in tests and fixtures.
    static IntMat from_rows(std::initializer_list<std::initializer_list<long long>> rows);
    static IntMat from_vec(const IntVec& v); // n x 1 column
    static IntMat diagonal(const IntVec& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    const Int& at(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }

    IntVec col(int j) const;
    IntVec row(int i) const;
    IntMat with_col(int j, const IntVec& v) const;
    IntMat block(int i0, int j0, int nrows, int ncols) const;

    MatBuf thaw() const; // mutable copy

    friend bool operator==(const IntMat& a, const IntMat& b);
    friend bool operator!=(const IntMat& a, const IntMat& b) { return !(a == b); }

private:
    friend class MatBuf;
    int rows_, cols_;
    std::vector<Int> e_;
};

IntMat transpose(const IntMat& a);
IntMat add(const IntMat& a, const IntMat& b);
IntMat sub(const IntMat& a, const IntMat& b);
IntMat negate(const IntMat& a);
IntMat scale(const IntMat& a, const Int& c);

// Product kernels.  matmul/matvec are OpenMP-parallel over output entries
// when the workload is large enough; snf::reference keeps the plain serial
// triple loop used as the independent oracle in tests and by the benchmark.
IntMat matmul(const IntMat& a, const IntMat& b);
IntVec matvec(const IntMat& a, const IntVec& v);

// ‖A‖ = max |a_ij|.
Int max_norm(const IntMat& a);
// Bit length of ‖A‖.
int length_bits(const IntMat& a);
// Bit length of the largest magnitude in column j.
int col_length_bits(const IntMat& a, int j);

// ---------------------------------------------------------------------------
// Smith form diagonal
// ---------------------------------------------------------------------------

struct SmithForm {
    IntVec diag;

    SmithForm() = default;
    explicit SmithForm(IntVec d) : diag(std::move(d)) {}

    int n() const { return static_cast<int>(diag.size()); }
    const Int& s(int j) const { return diag[j]; } // 0-based
    Int det() const;                              // product of the diagonal
    // All entries positive and s_1 | s_2 | ... | s_n.
    bool valid_chain() const;
    // Divides every invariant factor by c (throws if not exact).
    SmithForm scaled_down(const Int& c) const;

    friend bool operator==(const SmithForm& a, const SmithForm& b) { return a.diag == b.diag; }
    friend bool operator!=(const SmithForm& a, const SmithForm& b) { return !(a == b); }
};

// Column j reduced mod s_j (floor remainder, entries in [0, s_j)).
IntMat colmod(const IntMat& a, const SmithForm& s);
// Row i reduced mod s_i.
IntMat rowmod(const IntMat& a, const SmithForm& s);
// Entrywise reductions by a single modulus.
IntMat mat_mod(const IntMat& a, const Int& x);
IntMat mat_mod_symmetric(const IntMat& a, const Int& x);
IntMat mat_rem_star(const IntMat& a, const Int& x);

namespace reference {
// Naive serial kernels, kept as oracles (and as the baseline in snf_bench).
IntMat matmul(const IntMat& a, const IntMat& b);
IntMat colmod(const IntMat& a, const SmithForm& s);
} // namespace reference

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------
//
// First non-comment line: "rows cols"; then rows lines of space separated
// decimal integers.  Lines starting with '#' are ignored anywhere.

IntMat parse_matrix(std::istream& in);
IntMat parse_matrix_file(const std::string& path);
void serialize_matrix(std::ostream& out, const IntMat& a);
std::string to_text(const IntMat& a);
void write_matrix_file(const std::string& path, const IntMat& a);

} // namespace snf
