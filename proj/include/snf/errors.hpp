#pragma once

#include <stdexcept>
#include <string>

namespace snf {

// Base class for everything thrown by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input on the text/JSON parsing surface.
struct parse_error : error {
    using error::error;
};

// Operands with incompatible shapes.
struct dimension_error : error {
    using error::error;
};

// A contract violation on the caller's side (bad modulus, invalid Smith form, ...).
struct precondition_error : error {
    using error::error;
};

// A nonsingular matrix was required but det = 0 was established.
struct singular_error : error {
    using error::error;
};

// An internal re-verification failed.  This indicates a bug, not bad input.
struct integrity_error : error {
    using error::error;
};

// A Las Vegas loop ran out of attempts.  Carries how the attempts died.
struct retries_exhausted : error {
    int not_trivial_count;
    int fail_count;
    retries_exhausted(const std::string& what, int not_trivial, int fails)
        : error(what), not_trivial_count(not_trivial), fail_count(fails) {}
};

} // namespace snf
