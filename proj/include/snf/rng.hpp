#pragma once

#include <cstdint>
#include <gmpxx.h>

namespace snf {

// Counter-based pseudo random generator (splitmix64 finalizer over a keyed
// counter).  Two generators with the same seed produce the same stream, and
// fork() derives independent deterministic substreams, which is what lets
// retry attempts run concurrently without losing reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), bound > 0.  Rejection sampling so there is no
    // modulo bias.
    std::uint64_t below(std::uint64_t bound);

    // Uniform mpz in [0, bound), bound > 0.  Assembles random bits and
    // rejects values >= bound.
    mpz_class below(const mpz_class& bound);

    // Deterministic substream for attempt/stream `n`.
    Rng fork(std::uint64_t n) const {
        Rng r(seed_ ^ (0xD1B54A32D192ED03ull * (n + 1)));
        r.next_u64(); // decorrelate from the parent's first draw
        return r;
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

// Deterministic Miller-Rabin for 64-bit candidates (exact for n < 2^64).
bool is_prime_u64(std::uint64_t n);

} // namespace snf
