#pragma once

// Direct evaluation of d^w_t(n) = occ_w(n+t) - occ_w(n) (with the 0^l length
// correction) and the enumeration oracles that serve as ground truth for the
// transfer-matrix machinery. Nothing in this module touches characteristic
// functions or matrices.

#include "blockdelta/distribution.hpp"
#include "blockdelta/rational.hpp"
#include "blockdelta/words.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace blockdelta {

// phi(t,n): +1 if t = [w]_2 - n != 0, -1 if t != [w]_2 - n = 0, else 0,
// everything mod 2^l. This is the step term of d_t(n) = d_{t'}(floor(n/2)) + phi.
int phi_step(const Pattern& w, const BigInt& t, const BigInt& n);
int phi_step_u(const Pattern& w, std::uint64_t t, std::uint64_t n);

// d^w_t(n), including the -|(n+t)_2| + |(n)_2| correction when w = 0^l
long occ_diff(const Pattern& w, const BigInt& t, const BigInt& n);

// |uz|_w - |ux|_w; requires |u| = l-1 and |x| = |z|. When [z]_2 = [x]_2 + t
// this equals d_t([vux]_2) for every prefix v (no-carry window identity).
long occ_diff_window(const Pattern& w, const DigitString& u,
                     const DigitString& x, const DigitString& z);

struct OracleResult {
    Pattern w;
    BigInt t;
    int lambda = 0;
    bool exact = false; // counts/2^lambda certified equal to the exact densities
                        // (for constant w: on |k| <= kmax only)
    int kmax = 10;      // certification window for constant patterns
    std::map<long long, std::uint64_t> counts;

    std::string to_json() const; // {"w","t","lambda","exact","counts":[[k,c],...]}
};

// smallest lambda at which the per-n enumeration is certified below; the
// constant-pattern exponent carries a +(l-1) margin over the progression
// difference bound (the bound alone is not sufficient, see tests)
int exact_lambda(const Pattern& w, const BigInt& t, int kmax);

// counts d(w,t,n) over all n in [0, 2^lambda), parallel over disjoint ranges
OracleResult empirical_dist(const Pattern& w, const BigInt& t, int lambda, int threads = 1);

// Exact distribution by enumerating the progression family F_t directly:
// case-(I) windows u,x with [x]_2 + t < 2^h and case-(II) windows u 0 1^s y.
// For non-constant w the s-tail stabilizes and is lumped exactly; for
// constant w the support is cut at |k| <= kmax with the exact remaining mass
// in tail_bound. Pure window counting; independent of the CF engine.
IntDist exact_dist(const Pattern& w, const BigInt& t, int kmax = 10);

} // namespace blockdelta
