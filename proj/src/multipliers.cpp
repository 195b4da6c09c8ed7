#include "snf/multipliers.hpp"

#include <algorithm>
#include <exception>

#include "snf/errors.hpp"

namespace snf {

namespace {

// Sign-split digit expansion of m in radix 2^cw; index k holds the digit of
// weight 2^(k*cw).  All-zero leading matrices are not produced.
std::vector<IntMat> digit_split(const IntMat& m, int cw) {
    const int n = m.rows(), k = m.cols();
    int levels = 1;
    for (int j = 0; j < k; ++j)
        levels = std::max(levels, (col_length_bits(m, j) + cw - 1) / cw);
    std::vector<MatBuf> bufs;
    bufs.reserve(levels);
    for (int t = 0; t < levels; ++t) bufs.emplace_back(n, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) {
            Int q = m.at(i, j);
            for (int t = 0; q != 0 && t < levels; ++t) {
                if (t + 1 == levels) {
                    bufs[t].at(i, j) = q;
                    break;
                }
                mpz_tdiv_r_2exp(bufs[t].at(i, j).get_mpz_t(), q.get_mpz_t(),
                                static_cast<mp_bitcnt_t>(cw));
                mpz_tdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), static_cast<mp_bitcnt_t>(cw));
            }
        }
    std::vector<IntMat> out;
    out.reserve(levels);
    for (auto& b : bufs) out.push_back(b.freeze());
    return out;
}

std::vector<IntVec> digit_split_vec(const IntVec& w, int cw) {
    int levels = 1;
    for (const Int& x : w) levels = std::max(levels, (length_bits(x) + cw - 1) / cw);
    std::vector<IntVec> out(levels, IntVec(w.size(), 0));
    for (size_t i = 0; i < w.size(); ++i) {
        Int q = w[i];
        for (int t = 0; q != 0 && t < levels; ++t) {
            if (t + 1 == levels) {
                out[t][i] = q;
                break;
            }
            mpz_tdiv_r_2exp(out[t][i].get_mpz_t(), q.get_mpz_t(), static_cast<mp_bitcnt_t>(cw));
            mpz_tdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), static_cast<mp_bitcnt_t>(cw));
        }
    }
    return out;
}

bool all_zero_mat(const IntMat& a) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (a.at(i, j) != 0) return false;
    return true;
}

bool all_zero_vec(const IntVec& v) {
    for (const Int& x : v)
        if (x != 0) return false;
    return true;
}

void add_shifted(Int& acc, const Int& x, long shift_bits) {
    if (x == 0) return;
    Int t = x;
    mpz_mul_2exp(t.get_mpz_t(), t.get_mpz_t(), static_cast<mp_bitcnt_t>(shift_bits));
    acc += t;
}

IntMat col_scaled(const IntMat& u, const SmithForm& s) {
    MatBuf b = u.thaw();
    for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < u.cols(); ++j) b.at(i, j) *= s.s(j);
    return b.freeze();
}

} // namespace

Int lambda_bound(const SmithForm& s) {
    const int n = s.n();
    if (n < 1 || !s.valid_chain()) throw precondition_error("lambda_bound: invalid Smith diagonal");
    Int det2s = s.det();
    mpz_mul_2exp(det2s.get_mpz_t(), det2s.get_mpz_t(), static_cast<mp_bitcnt_t>(n));
    const Int r = root_ceil(det2s, static_cast<unsigned long>(n));
    return 105 * std::max(Int(n), r);
}

IntMat draw_perturbation(int n, const Int& lambda, Rng& rng) {
    if (lambda <= 0) throw precondition_error("draw_perturbation: lambda must be positive");
    MatBuf b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b.at(i, j) = rng.below(lambda);
    return b.freeze();
}

IntMat perturb_with(const IntMat& m, const SmithForm& two_s, const IntMat& r) {
    const int n = m.rows();
    if (m.cols() != n || r.rows() != n || r.cols() != n || two_s.n() != n)
        throw dimension_error("perturb_with: shape mismatch");
    MatBuf b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b.at(i, j) = m.at(i, j) + two_s.s(j) * r.at(i, j);
    return b.freeze();
}

IntMat hermite_from_trivial(int n, const TrivialHermite& th) {
    if (static_cast<int>(th.hbar.size()) != n - 1)
        throw dimension_error("hermite_from_trivial: hbar length mismatch");
    MatBuf b(n, n);
    b.at(0, 0) = th.h1;
    for (int i = 1; i < n; ++i) {
        b.at(i, i) = 1;
        b.at(i, 0) = th.hbar[i - 1];
    }
    return b.freeze();
}

std::optional<TrivialHermite> trivial_lower_hermite(const IntMat& b) {
    const int n = b.rows();
    if (b.cols() != n || n < 1) throw dimension_error("trivial_lower_hermite: matrix must be square");
    const SmithMassager sm = smith_massager(b); // throws singular_error if det B = 0

    if (n >= 2 && sm.S.s(n - 2) != 1) return std::nullopt;
    TrivialHermite th;
    th.h1 = sm.S.s(n - 1);
    th.hbar.assign(n - 1, Int(0));
    if (th.h1 == 1) return th; // B unimodular, H = I

    const Int& m1 = sm.M.at(0, n - 1);
    Int g;
    mpz_gcd(g.get_mpz_t(), m1.get_mpz_t(), th.h1.get_mpz_t());
    if (g != 1) return std::nullopt;
    Int minv;
    mpz_invert(minv.get_mpz_t(), m1.get_mpz_t(), th.h1.get_mpz_t());
    for (int i = 1; i < n; ++i) th.hbar[i - 1] = rem(-minv * sm.M.at(i, n - 1), th.h1);
    return th;
}

IntMat extract_unimodular(const IntMat& b, const TrivialHermite& th) {
    const int n = b.rows();
    if (b.cols() != n) throw dimension_error("extract_unimodular: matrix must be square");
    if (static_cast<int>(th.hbar.size()) != n - 1)
        throw dimension_error("extract_unimodular: hbar length mismatch");
    IntVec c0(n);
    const IntVec corr =
        n > 1 ? unbalanced_matvec(b.block(0, 1, n, n - 1), th.hbar) : IntVec(1, Int(0));
    for (int i = 0; i < n; ++i) {
        Int num = b.at(i, 0) - corr[i];
        if (!mpz_divisible_p(num.get_mpz_t(), th.h1.get_mpz_t()))
            throw integrity_error("extract_unimodular: first column not divisible by h1");
        mpz_divexact(c0[i].get_mpz_t(), num.get_mpz_t(), th.h1.get_mpz_t());
    }
    return b.with_col(0, c0);
}

IntMat compute_U(const IntMat& a, const IntMat& v, const SmithForm& s) {
    const int n = a.rows();
    if (a.cols() != n || v.rows() != n || v.cols() != n || s.n() != n)
        throw dimension_error("compute_U: shape mismatch");
    const IntMat av = unbalanced_matmul(a, v);
    MatBuf u(n, n);
    for (int j = 0; j < n; ++j) {
        const Int& sj = s.s(j);
        for (int i = 0; i < n; ++i) {
            if (!mpz_divisible_p(av.at(i, j).get_mpz_t(), sj.get_mpz_t()))
                throw integrity_error("compute_U: A V column not divisible by its invariant factor");
            mpz_divexact(u.at(i, j).get_mpz_t(), av.at(i, j).get_mpz_t(), sj.get_mpz_t());
        }
    }
    return u.freeze();
}

IntVec unbalanced_matvec(const IntMat& m, const IntVec& w) {
    const int n = m.rows(), k = m.cols();
    if (static_cast<int>(w.size()) != k) throw dimension_error("unbalanced_matvec: shape mismatch");
    if (k == 0) return IntVec(n, Int(0));

    long total = 0;
    for (int j = 0; j < k; ++j) total += col_length_bits(m, j);
    long wlen = 1;
    for (const Int& x : w) wlen = std::max(wlen, static_cast<long>(length_bits(x)));
    const long dbits = std::max(total, wlen);
    const int cw = static_cast<int>(std::max<long>(1, (dbits + k - 1) / k));

    const std::vector<IntMat> mdig = digit_split(m, cw);
    const std::vector<IntVec> wdig = digit_split_vec(w, cw);

    std::vector<IntVec> conv(mdig.size() + wdig.size() - 1, IntVec(n, Int(0)));
    for (size_t s = 0; s < mdig.size(); ++s) {
        if (all_zero_mat(mdig[s])) continue;
        for (size_t t = 0; t < wdig.size(); ++t) {
            if (all_zero_vec(wdig[t])) continue;
            const IntVec part = matvec(mdig[s], wdig[t]);
            for (int i = 0; i < n; ++i) conv[s + t][i] += part[i];
        }
    }
    IntVec res(n, Int(0));
    for (size_t lvl = 0; lvl < conv.size(); ++lvl)
        for (int i = 0; i < n; ++i) add_shifted(res[i], conv[lvl][i], static_cast<long>(lvl) * cw);
    return res;
}

IntMat unbalanced_matmul(const IntMat& a, const IntMat& m) {
    if (a.cols() != m.rows()) throw dimension_error("unbalanced_matmul: shape mismatch");
    const int cols = std::max(1, m.cols());
    long total = 0;
    for (int j = 0; j < m.cols(); ++j) total += col_length_bits(m, j);
    const long per_col = (total + cols - 1) / cols;
    const int cw = static_cast<int>(std::max<long>(length_bits(a), std::max<long>(1, per_col)));

    const std::vector<IntMat> mdig = digit_split(m, cw);
    MatBuf acc(a.rows(), m.cols());
    for (size_t t = 0; t < mdig.size(); ++t) {
        if (all_zero_mat(mdig[t])) continue;
        const IntMat part = matmul(a, mdig[t]);
        for (int i = 0; i < part.rows(); ++i)
            for (int j = 0; j < part.cols(); ++j)
                add_shifted(acc.at(i, j), part.at(i, j), static_cast<long>(t) * cw);
    }
    return acc.freeze();
}

SmithMultipliers smith_form_multipliers(const IntMat& a, Rng& rng, const SfmOptions& opts,
                                        SfmStats* stats) {
    const int n = a.rows();
    if (a.cols() != n || n < 1)
        throw dimension_error("smith_form_multipliers: matrix must be square and nonempty");
    if ((opts.inject_two_s == nullptr) != (opts.inject_m == nullptr))
        throw precondition_error("smith_form_multipliers: inject_two_s and inject_m go together");

    SmithForm two_s;
    IntMat m;
    if (opts.inject_m) {
        two_s = *opts.inject_two_s;
        m = *opts.inject_m;
        if (two_s.n() != n || m.rows() != n || m.cols() != n)
            throw dimension_error("smith_form_multipliers: injected massager shape mismatch");
    } else {
        const SmithMassager sm = smith_massager(scale(a, 2)); // throws singular_error if det A = 0
        two_s = sm.S;
        m = sm.M;
    }
    const SmithForm s = two_s.scaled_down(2);
    Int lambda;
    if (opts.lambda_override) {
        lambda = *opts.lambda_override;
        if (lambda <= 0) throw precondition_error("smith_form_multipliers: lambda must be positive");
        if (!opts.allow_small_lambda && lambda < lambda_bound(s))
            throw precondition_error(
                "smith_form_multipliers: lambda override below the certified bound");
    } else {
        lambda = lambda_bound(s);
    }

    enum class St { ok, not_trivial, fail, error };
    struct AttemptOut {
        St st = St::fail;
        IntMat b, h, v, u;
        std::exception_ptr err;
    };

    // Every attempt gets its own forked stream keyed by the attempt index,
    // so results do not depend on opts.jobs or on retry scheduling.
    const Rng call_rng(rng.next_u64());
    auto evaluate = [&](int idx) {
        AttemptOut out;
        try {
            Rng sub = call_rng.fork(static_cast<std::uint64_t>(idx));
            const IntMat r = (idx == 0 && opts.inject_r) ? *opts.inject_r
                                                         : draw_perturbation(n, lambda, sub);
            out.b = perturb_with(m, two_s, r);
            const auto th = trivial_lower_hermite(out.b);
            if (!th) {
                out.st = St::not_trivial;
                return out;
            }
            out.h = hermite_from_trivial(n, *th);
            out.v = extract_unimodular(out.b, *th);
            out.u = compute_U(a, out.v, s);
            if (matmul(a, out.v) != col_scaled(out.u, s))
                throw integrity_error("smith_form_multipliers: A V != U S on re-verification");
            out.st = St::ok;
        } catch (const singular_error&) {
            out.st = St::fail; // perturbation landed on a singular matrix
        } catch (...) {
            out.st = St::error;
            out.err = std::current_exception();
        }
        return out;
    };

    const int max_r = std::max(1, opts.max_retries);
    const int jobs = std::max(1, opts.jobs);
    int not_trivial = 0, fails = 0;
    for (int base = 0; base < max_r; base += jobs) {
        const int batch = std::min(jobs, max_r - base);
        std::vector<AttemptOut> outs(batch);
        if (batch == 1) {
            outs[0] = evaluate(base);
        } else {
#pragma omp parallel for schedule(dynamic, 1)
            for (int k = 0; k < batch; ++k) outs[k] = evaluate(base + k);
        }
        for (int k = 0; k < batch; ++k) {
            AttemptOut& out = outs[k];
            if (out.st == St::error) std::rethrow_exception(out.err);
            if (out.st == St::not_trivial) ++not_trivial;
            if (out.st == St::fail) ++fails;
            if (out.st != St::ok) continue;
            if (stats) {
                stats->attempts = base + k + 1;
                stats->not_trivial = not_trivial;
                stats->fails = fails;
                stats->B = out.b;
                stats->H = out.h;
            }
            return {s, out.v, out.u};
        }
    }
    if (stats) {
        stats->attempts = max_r;
        stats->not_trivial = not_trivial;
        stats->fails = fails;
    }
    throw retries_exhausted("smith_form_multipliers: no trivial Hermite form found", not_trivial,
                            fails);
}

SizeReport check_sizes(const IntMat& a, const SmithMultipliers& t) {
    const int n = a.rows();
    if (t.V.rows() != n || t.V.cols() != n || t.U.rows() != n || t.U.cols() != n || t.S.n() != n)
        throw dimension_error("check_sizes: shape mismatch");
    const Int norm_a = max_norm(a);
    const Int det_s = t.S.det();
    const Int v_base = Int(420) * n * norm_a;
    const Int u_base = Int(420) * n * n * norm_a * norm_a;

    SizeReport rep;
    long vbits = 0, ubits = 0;
    for (int j = 0; j < n; ++j) {
        const Int v_lim = v_base * (j == 0 ? det_s + n : t.S.s(j));
        const Int u_lim = u_base * (j == 0 ? det_s + n : Int(1));
        Int vmax = 0, umax = 0;
        for (int i = 0; i < n; ++i) {
            const Int va = abs(t.V.at(i, j));
            const Int ua = abs(t.U.at(i, j));
            if (va > vmax) vmax = va;
            if (ua > umax) umax = ua;
        }
        if (vmax > v_lim) {
            rep.ok = false;
            rep.bad_v_cols.push_back(j);
        }
        if (umax > u_lim) {
            rep.ok = false;
            rep.bad_u_cols.push_back(j);
        }
        vbits += col_length_bits(t.V, j);
        ubits += col_length_bits(t.U, j);
    }
    rep.avg_v_col_bits = static_cast<double>(vbits) / n;
    rep.avg_u_col_bits = static_cast<double>(ubits) / n;
    return rep;
}

} // namespace snf
