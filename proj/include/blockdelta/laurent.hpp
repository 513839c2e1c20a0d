#pragma once

// Laurent polynomials in z with exact rational coefficients. z stands for
// e(i*theta) on the unit circle; coefficients are stored in normal form
// (no explicit zeros).

#include "blockdelta/rational.hpp"

#include <complex>
#include <map>
#include <optional>

namespace blockdelta {

class LaurentPoly {
public:
    LaurentPoly() = default;
    static LaurentPoly monomial(const Rat& c, int e);

    bool is_zero() const { return coef_.empty(); }
    std::size_t term_count() const { return coef_.size(); }
    int min_exp() const; // requires nonzero
    int max_exp() const;

    Rat at(int e) const;
    void add_term(int e, const Rat& c);
    // *this += c * z^shift * other
    void add_scaled(const LaurentPoly& other, const Rat& c, int shift = 0);
    void scale(const Rat& c);

    LaurentPoly& operator+=(const LaurentPoly& o);
    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { a += b; return a; }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);

    // sum of coefficients = value at z = 1
    Rat value_at_one() const;
    // exact value at rational z (used for divisibility sanity checks)
    Rat value_at(const Rat& z) const;
    std::complex<double> eval_unit(double theta) const;

    // exact quotient by (2 - z^sigma), sigma in {+1,-1}; nullopt if not divisible
    std::optional<LaurentPoly> divide_once(int sigma) const;

    const std::map<int, Rat>& terms() const { return coef_; }

    bool operator==(const LaurentPoly&) const = default;

private:
    std::map<int, Rat> coef_;
};

} // namespace blockdelta
