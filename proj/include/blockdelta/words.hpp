#pragma once

// Binary-word primitives: overlapping occurrence counting with the
// leading-zero convention occ_w(n) = |0^{l-1} (n)_2|_w, reversal/negation,
// and prefix-suffix sets. Everything here is immutable and pure.

#include "blockdelta/rational.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace blockdelta {

// A finite binary word. Leading zeros are significant: [x]_2 < 2^{|x|} but
// distinct words may share the same value.
class DigitString {
public:
    DigitString() = default;
    explicit DigitString(std::string_view s); // throws on characters outside {0,1}
    explicit DigitString(std::vector<std::uint8_t> digits);

    // the width-digit expansion of v; requires v < 2^width
    static DigitString from_value(const BigInt& v, std::size_t width);

    const std::vector<std::uint8_t>& digits() const { return digits_; }
    std::size_t size() const { return digits_.size(); }
    bool empty() const { return digits_.empty(); }
    std::uint8_t operator[](std::size_t i) const { return digits_[i]; }

    BigInt value() const;
    std::string str() const;
    DigitString prefix(std::size_t n) const;

    bool operator==(const DigitString&) const = default;

private:
    std::vector<std::uint8_t> digits_; // most significant first
};

DigitString reverse(const DigitString& x);
DigitString negate(const DigitString& x);
DigitString concat(const DigitString& a, const DigitString& b);

// The fixed pattern w, |w| >= 2. Carries the derived quantities used by the
// moment formulas: [w]_2, the constant-pattern flag, and the maximal border
// q (longest proper prefix that is also a suffix) with p = l - q.
class Pattern {
public:
    explicit Pattern(std::string_view s); // throws on l < 2 or non-binary input

    const DigitString& word() const { return word_; }
    unsigned length() const { return ell_; }
    std::uint64_t value() const { return value_; } // [w]_2
    bool is_constant() const { return constant_; }
    unsigned max_overlap() const { return border_q_; } // q
    unsigned period() const { return ell_ - border_q_; } // p

    // denominator orientation of the single pole (2 - z^sigma):
    // +1 for 0^l, -1 for 1^l, 0 for non-constant patterns (no pole)
    int sigma() const;

    Pattern negated() const;
    Pattern reversed() const;
    std::string str() const { return word_.str(); }

    bool operator==(const Pattern& o) const { return word_ == o.word_; }

private:
    DigitString word_;
    unsigned ell_ = 0;
    std::uint64_t value_ = 0;
    bool constant_ = false;
    unsigned border_q_ = 0;
};

// |v|_w with overlapping occurrences; 0 when |v| < l. Naive scan.
long count_occurrences(const DigitString& v, const Pattern& w);

// occ_w(n) = |0^{l-1}(n)_2|_w
long occ(const Pattern& w, const BigInt& n);

// P(x): nonempty prefixes of x that are suffixes of w, shortest first
std::vector<DigitString> prefix_suffix_set(const DigitString& x, const Pattern& w);

// sum over p in P(x) of 2^{|p|-1}; the weight appearing in the mean formula
BigInt prefix_suffix_weight(const DigitString& x, const Pattern& w);

// number of maximal blocks of 1s in (t)_2, i.e. occ_{01}(t)
long blocks01(const BigInt& t);

// --- fast fixed-width helpers used by the enumeration paths ---

// occurrences of the l-bit value wval in the low `width` bits of `window`
// (digit strings as machine words, most significant = highest bit)
inline int count_occ_u64(std::uint64_t window, int width, std::uint64_t wval, int ell) {
    if (width < ell) return 0;
    const std::uint64_t mask = (ell >= 64) ? ~0ull : ((1ull << ell) - 1);
    int c = 0;
    for (int i = 0; i + ell <= width; ++i)
        c += static_cast<int>(((window >> i) & mask) == wval);
    return c;
}

inline int bit_length_u64(std::uint64_t n) {
    return n == 0 ? 0 : 64 - __builtin_clzll(n);
}

inline int blocks01_u64(std::uint64_t t) {
    return static_cast<int>(__builtin_popcountll(t & ~(t >> 1)));
}

} // namespace blockdelta
