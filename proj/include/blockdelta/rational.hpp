#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace blockdelta {

// Exact arithmetic backed by GMP. All probabilities, moments and polynomial
// coefficients in this library are Rat; all shift amounts t are BigInt (they
// exceed 64 bits in the scaling experiments).
using Rat = mpq_class;
using BigInt = mpz_class;

// Thrown when an enumeration or matrix size exceeds the configured
// desk-scale budget. The CLI maps this to exit code 3.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

inline Rat pow2_rat(long e) {
    // 2^e as an exact rational, e may be negative
    Rat r(1);
    if (e >= 0)
        mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(e));
    else
        mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(-e));
    return r;
}

inline BigInt pow2_int(unsigned long e) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
    return r;
}

// number of binary digits of n >= 0, with |(0)_2| = 0
inline long bit_length(const BigInt& n) {
    if (n == 0) return 0;
    return static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

inline Rat rat_of(long long v) {
    // mpq_class has no long long constructor
    return Rat(BigInt(static_cast<long>(v)));
}

// rationals print as "num/den", denominator always explicit
inline std::string rat_str(const Rat& r) {
    std::string s = r.get_str();
    if (s.find('/') == std::string::npos) s += "/1";
    return s;
}

} // namespace blockdelta
