#pragma once

#include <optional>
#include <vector>

#include "snf/intmat.hpp"
#include "snf/massager.hpp"
#include "snf/rng.hpp"

namespace snf {

// Perturbation bound: 105 * max(n, ceil(det(2S)^(1/n))).
Int lambda_bound(const SmithForm& s);

// Entries drawn uniformly from [0, lambda), row-major order.
IntMat draw_perturbation(int n, const Int& lambda, Rng& rng);

// B = M + R * diag(2S): column j of B is col j of M plus 2 s_j times col j of R.
IntMat perturb_with(const IntMat& m, const SmithForm& two_s, const IntMat& r);

// A lower Hermite form that is trivial except for its first column:
// diagonal (h1, 1, ..., 1), below-diagonal entries hbar in [0, h1).
struct TrivialHermite {
    Int h1;
    IntVec hbar;
};

IntMat hermite_from_trivial(int n, const TrivialHermite& th);

// Reads the Hermite form of B off a Smith massager of B.  Returns nullopt
// (NotTrivial) when the second largest invariant factor of B is not 1 or
// the last massager column is not invertible mod h1.
std::optional<TrivialHermite> trivial_lower_hermite(const IntMat& b);

// V = B with column 0 replaced by (B[:,0] - B[:,1..n] hbar) / h1; exact by
// construction, |det V| = 1.
IntMat extract_unimodular(const IntMat& b, const TrivialHermite& th);

// U = A V diag(S)^{-1}, columnwise exact division.
IntMat compute_U(const IntMat& a, const IntMat& v, const SmithForm& s);

// Exact products organised around one-sided size skew: the skewed operand is
// split into sign-split digits of a power-of-two radix so every partial
// product is balanced.
IntVec unbalanced_matvec(const IntMat& m, const IntVec& w);
IntMat unbalanced_matmul(const IntMat& a, const IntMat& m);

// The certified output: A V = U diag(S) with U, V unimodular.
struct SmithMultipliers {
    SmithForm S;
    IntMat V;
    IntMat U;
};

struct SfmOptions {
    int max_retries = 40;
    int jobs = 1;
    std::optional<Int> lambda_override; // testing only; breaks the failure-rate guarantee
    bool allow_small_lambda = false;    // permit an override below the certified bound
    // Replay hooks: supply a fixed massager (and optionally the attempt-0
    // perturbation) instead of computing / drawing them.
    const SmithForm* inject_two_s = nullptr;
    const IntMat* inject_m = nullptr;
    const IntMat* inject_r = nullptr;
};

struct SfmStats {
    int attempts = 0;
    int not_trivial = 0; // perturbations whose Hermite form was not trivial
    int fails = 0;       // perturbations that came out singular
    IntMat B, H;         // successful perturbation and its Hermite form
};

// The full Las Vegas pipeline: massage 2A, perturb, read off the trivial
// Hermite form, extract V, divide out U, re-verify A V = U S with an
// independent product.  Retries draw fresh perturbations; results are
// deterministic for a given rng state regardless of opts.jobs.
SmithMultipliers smith_form_multipliers(const IntMat& a, Rng& rng, const SfmOptions& opts = {},
                                        SfmStats* stats = nullptr);

struct SizeReport {
    bool ok = true;
    std::vector<int> bad_v_cols, bad_u_cols; // columns exceeding their bound
    double avg_v_col_bits = 0.0, avg_u_col_bits = 0.0;
};

// Checks the per-column norm bounds ||V_j|| <= 420 n ||A|| * (det S + n for
// j = 0, else s_j) and ||U_j|| <= 420 n^2 ||A||^2 * (det S + n for j = 0,
// else 1), and reports average column bit lengths.
SizeReport check_sizes(const IntMat& a, const SmithMultipliers& t);

} // namespace snf
