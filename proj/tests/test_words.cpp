#include "blockdelta/words.hpp"

#include <doctest.h>

#include <random>

using namespace blockdelta;

namespace {

DigitString random_word(std::mt19937& rng, std::size_t len) {
    std::vector<std::uint8_t> d(len);
    for (auto& b : d) b = static_cast<std::uint8_t>(rng() & 1);
    return DigitString(std::move(d));
}

Pattern pattern_of(unsigned value, unsigned ell) {
    std::string s;
    for (unsigned i = 0; i < ell; ++i)
        s.push_back(((value >> (ell - 1 - i)) & 1) ? '1' : '0');
    return Pattern(s);
}

} // namespace

TEST_CASE("pattern validation and derived fields") {
    CHECK_THROWS_AS(Pattern("0"), std::invalid_argument);
    CHECK_THROWS_AS(Pattern("1"), std::invalid_argument);
    CHECK_THROWS_AS(Pattern(""), std::invalid_argument);
    CHECK_THROWS_AS(Pattern("01a"), std::invalid_argument);

    Pattern w("011");
    CHECK(w.length() == 3);
    CHECK(w.value() == 3);
    CHECK(!w.is_constant());
    CHECK(w.max_overlap() == 0);
    CHECK(w.period() == 3);
    CHECK(w.sigma() == 0);

    Pattern v("0101");
    CHECK(v.max_overlap() == 2);
    CHECK(v.period() == 2);

    Pattern c0("000"), c1("11");
    CHECK(c0.is_constant());
    CHECK(c0.max_overlap() == 2); // l - 1
    CHECK(c0.sigma() == +1);
    CHECK(c1.sigma() == -1);

    // non-constant borders stay <= l-2
    for (unsigned ell = 2; ell <= 6; ++ell)
        for (unsigned val = 0; val < (1u << ell); ++val) {
            Pattern p = pattern_of(val, ell);
            if (!p.is_constant()) CHECK(p.max_overlap() <= ell - 2);
        }
}

TEST_CASE("overlapping occurrence counting") {
    CHECK(count_occurrences(DigitString("001001"), Pattern("001")) == 2);
    CHECK(count_occurrences(DigitString("1111"), Pattern("111")) == 2);
    CHECK(count_occurrences(DigitString(""), Pattern("01")) == 0);
    CHECK(count_occurrences(DigitString("1"), Pattern("11")) == 0);
}

TEST_CASE("occ with the leading-zero convention") {
    CHECK(occ(Pattern("001"), 9) == 2);
    CHECK(occ(Pattern("11"), 3) == 1);
    // 0^{l-1}(0)_2 = "0" for l = 2; no occurrence of 00
    CHECK(occ(Pattern("00"), 0) == count_occurrences(DigitString("0"), Pattern("00")));
    CHECK(occ(Pattern("00"), 0) == 0);
    CHECK(occ(Pattern("01"), 5) == 2); // 0101
}

TEST_CASE("reverse and negate are involutions") {
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        const auto x = random_word(rng, 1 + (rng() % 12));
        CHECK(reverse(reverse(x)) == x);
        CHECK(negate(negate(x)) == x);
    }
    CHECK(negate(DigitString("011")) == DigitString("100"));
    CHECK(reverse(DigitString("011")) == DigitString("110"));
}

TEST_CASE("occurrences respect reversal and negation") {
    std::mt19937 rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto v = random_word(rng, 3 + (rng() % 14));
        const unsigned ell = 2 + (rng() % 3);
        const Pattern w = pattern_of(rng() % (1u << ell), ell);
        CHECK(count_occurrences(v, w) == count_occurrences(reverse(v), w.reversed()));
        CHECK(count_occurrences(v, w) == count_occurrences(negate(v), w.negated()));
    }
}

TEST_CASE("prefix-suffix sets") {
    // w = 10^{l-1}: P(0^{l-1}) = {0, 00, ..., 0^{l-1}} intersected with suffixes
    for (unsigned ell : {3u, 5u}) {
        Pattern w("1" + std::string(ell - 1, '0'));
        DigitString x(std::string(ell - 1, '0'));
        const auto ps = prefix_suffix_set(x, w);
        REQUIRE(ps.size() == ell - 1);
        for (std::size_t h = 1; h <= ell - 1; ++h)
            CHECK(ps[h - 1] == DigitString(std::string(h, '0')));
    }
    CHECK(prefix_suffix_set(DigitString(""), Pattern("011")).empty());

    // brute-force oracle on w = 011, x = 110
    const auto ps = prefix_suffix_set(DigitString("110"), Pattern("011"));
    REQUIRE(ps.size() == 2);
    CHECK(ps[0] == DigitString("1"));
    CHECK(ps[1] == DigitString("11"));
}

TEST_CASE("double counting identity, exhaustive for small l") {
    for (unsigned ell = 2; ell <= 5; ++ell) {
        for (unsigned wv = 0; wv < (1u << ell); ++wv) {
            const Pattern w = pattern_of(wv, ell);
            const unsigned width = ell - 1;
            for (unsigned zv = 0; zv < (1u << width); ++zv) {
                const auto z = DigitString::from_value(BigInt(zv), width);
                BigInt lhs = 0;
                for (unsigned uv = 0; uv < (1u << width); ++uv)
                    lhs += count_occurrences(
                        concat(DigitString::from_value(BigInt(uv), width), z), w);
                CHECK(lhs == prefix_suffix_weight(z, w));
            }
        }
    }
}

TEST_CASE("overlap bound for non-constant patterns") {
    std::mt19937 rng(13);
    for (int i = 0; i < 300; ++i) {
        const unsigned ell = 2 + (rng() % 4);
        const Pattern w = pattern_of(rng() % (1u << ell), ell);
        if (w.is_constant()) continue;
        const auto v = random_word(rng, ell + (rng() % 20));
        const long cnt = count_occurrences(v, w);
        // |v|_w <= (|v| - l)/p + 1
        CHECK(cnt * static_cast<long>(w.period()) <=
              static_cast<long>(v.size() - w.length()) + static_cast<long>(w.period()));
    }
}

TEST_CASE("blocks01 counts maximal runs of ones") {
    CHECK(blocks01(0) == 0);
    CHECK(blocks01(0b1011) == 2);
    BigInt t = 0;
    for (int n = 1; n <= 40; ++n) {
        t = (t << 2) + 2; // append "10"
        CHECK(blocks01(t) == n);
    }
    CHECK(blocks01(BigInt(0b1011)) == occ(Pattern("01"), BigInt(0b1011)));
    for (unsigned long v = 0; v < 512; ++v)
        CHECK(blocks01(BigInt(v)) == occ(Pattern("01"), BigInt(v)));
}

TEST_CASE("digit string value round trips") {
    CHECK(DigitString("00101").value() == 5);
    CHECK(DigitString::from_value(BigInt(5), 5) == DigitString("00101"));
    CHECK_THROWS_AS(DigitString::from_value(BigInt(8), 3), std::invalid_argument);
    CHECK(DigitString("").value() == 0);
}
