#include "blockdelta/words.hpp"

#include <algorithm>

namespace blockdelta {

DigitString::DigitString(std::string_view s) {
    digits_.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("digit string must be over {0,1}: '" + std::string(s) + "'");
        digits_.push_back(static_cast<std::uint8_t>(c - '0'));
    }
}

DigitString::DigitString(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {
    for (auto d : digits_)
        if (d > 1) throw std::invalid_argument("digit out of range");
}

DigitString DigitString::from_value(const BigInt& v, std::size_t width) {
    if (v < 0 || bit_length(v) > static_cast<long>(width))
        throw std::invalid_argument("value does not fit the requested width");
    std::vector<std::uint8_t> d(width, 0);
    for (std::size_t i = 0; i < width; ++i)
        d[width - 1 - i] = static_cast<std::uint8_t>(mpz_tstbit(v.get_mpz_t(), i));
    return DigitString(std::move(d));
}

BigInt DigitString::value() const {
    BigInt v = 0;
    for (auto d : digits_) {
        v <<= 1;
        if (d) v += 1;
    }
    return v;
}

std::string DigitString::str() const {
    std::string s;
    s.reserve(digits_.size());
    for (auto d : digits_) s.push_back(static_cast<char>('0' + d));
    return s;
}

DigitString DigitString::prefix(std::size_t n) const {
    return DigitString(std::vector<std::uint8_t>(digits_.begin(), digits_.begin() + std::min(n, size())));
}

DigitString reverse(const DigitString& x) {
    auto d = x.digits();
    std::reverse(d.begin(), d.end());
    return DigitString(std::move(d));
}

DigitString negate(const DigitString& x) {
    auto d = x.digits();
    for (auto& b : d) b = static_cast<std::uint8_t>(1 - b);
    return DigitString(std::move(d));
}

DigitString concat(const DigitString& a, const DigitString& b) {
    auto d = a.digits();
    d.insert(d.end(), b.digits().begin(), b.digits().end());
    return DigitString(std::move(d));
}

Pattern::Pattern(std::string_view s) : word_(s) {
    if (word_.size() < 2)
        throw std::invalid_argument("pattern must have length at least 2: '" + std::string(s) + "'");
    if (word_.size() > 48)
        throw std::invalid_argument("pattern length above supported limit (48)");
    ell_ = static_cast<unsigned>(word_.size());
    value_ = word_.value().get_ui();
    constant_ = true;
    for (std::size_t i = 1; i < word_.size(); ++i)
        if (word_[i] != word_[0]) { constant_ = false; break; }
    // maximal proper border
    border_q_ = 0;
    for (unsigned b = ell_ - 1; b >= 1; --b) {
        bool ok = true;
        for (unsigned i = 0; i < b && ok; ++i)
            ok = word_[i] == word_[ell_ - b + i];
        if (ok) { border_q_ = b; break; }
    }
}

int Pattern::sigma() const {
    if (!constant_) return 0;
    return word_[0] == 0 ? +1 : -1;
}

Pattern Pattern::negated() const { return Pattern(negate(word_).str()); }
Pattern Pattern::reversed() const { return Pattern(reverse(word_).str()); }

long count_occurrences(const DigitString& v, const Pattern& w) {
    const auto& vd = v.digits();
    const auto& wd = w.word().digits();
    if (vd.size() < wd.size()) return 0;
    long c = 0;
    for (std::size_t i = 0; i + wd.size() <= vd.size(); ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < wd.size(); ++j)
            if (vd[i + j] != wd[j]) { hit = false; break; }
        c += hit;
    }
    return c;
}

long occ(const Pattern& w, const BigInt& n) {
    if (n < 0) throw std::invalid_argument("occ: n must be nonnegative");
    const long nb = bit_length(n);
    std::vector<std::uint8_t> d(static_cast<std::size_t>(nb) + w.length() - 1, 0);
    for (long i = 0; i < nb; ++i)
        d[d.size() - 1 - static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(mpz_tstbit(n.get_mpz_t(), static_cast<unsigned long>(i)));
    return count_occurrences(DigitString(std::move(d)), w);
}

std::vector<DigitString> prefix_suffix_set(const DigitString& x, const Pattern& w) {
    std::vector<DigitString> out;
    const auto& wd = w.word().digits();
    for (std::size_t len = 1; len <= x.size(); ++len) {
        if (len > wd.size()) break;
        bool ok = true;
        for (std::size_t i = 0; i < len && ok; ++i)
            ok = x[i] == wd[wd.size() - len + i];
        if (ok) out.push_back(x.prefix(len));
    }
    return out;
}

BigInt prefix_suffix_weight(const DigitString& x, const Pattern& w) {
    BigInt s = 0;
    for (const auto& p : prefix_suffix_set(x, w))
        s += pow2_int(static_cast<unsigned long>(p.size() - 1));
    return s;
}

long blocks01(const BigInt& t) {
    if (t < 0) throw std::invalid_argument("blocks01: t must be nonnegative");
    if (t == 0) return 0;
    BigInt u = t & ~(t >> 1);
    return static_cast<long>(mpz_popcount(u.get_mpz_t()));
}

} // namespace blockdelta
