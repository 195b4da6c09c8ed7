// Benchmarks the OpenMP product/reduction kernels against the serial
// reference implementations and checks that they agree bit for bit.
//
// Usage: snf_bench [n] [bits] [reps]

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "snf/intmat.hpp"
#include "snf/rng.hpp"

namespace {

using namespace snf;

IntMat random_matrix(int n, int bits, Rng& rng) {
    Int bound = 1;
    mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
    MatBuf b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            b.at(i, j) = rng.below(bound);
            if (rng.below(std::uint64_t(2)) == 1) b.at(i, j) = -b.at(i, j);
        }
    return b.freeze();
}

template <typename F>
double time_ms(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 96;
    const int bits = argc > 2 ? std::atoi(argv[2]) : 512;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 3;
    if (n <= 0 || bits <= 0 || reps <= 0) {
        std::cerr << "usage: snf_bench [n] [bits] [reps]\n";
        return 2;
    }

    Rng rng(20240817);
    const IntMat a = random_matrix(n, bits, rng);
    const IntMat b = random_matrix(n, bits, rng);
    IntVec diag(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = rng.below(std::uint64_t(1) << 20) + 1;
        if (i > 0) diag[i] *= diag[i - 1]; // keep a divisibility chain
    }
    const SmithForm s{diag};

    IntMat prod_ref, prod_par, mod_ref, mod_par;
    const double t_mm_ref = time_ms([&] { prod_ref = reference::matmul(a, b); }, reps);
    const double t_mm_par = time_ms([&] { prod_par = matmul(a, b); }, reps);
    const double t_cm_ref = time_ms([&] { mod_ref = reference::colmod(a, s); }, reps);
    const double t_cm_par = time_ms([&] { mod_par = colmod(a, s); }, reps);

    const bool ok = prod_ref == prod_par && mod_ref == mod_par;
    std::cout << "n = " << n << ", entry bits = " << bits << ", reps = " << reps << "\n\n";
    std::cout << "kernel      serial (ms)   openmp (ms)   speedup\n";
    std::cout << "matmul      " << t_mm_ref << "   " << t_mm_par << "   " << t_mm_ref / t_mm_par
              << "\n";
    std::cout << "colmod      " << t_cm_ref << "   " << t_cm_par << "   " << t_cm_ref / t_cm_par
              << "\n\n";
    std::cout << "results identical: " << (ok ? "yes" : "NO") << '\n';
    return ok ? 0 : 1;
}
