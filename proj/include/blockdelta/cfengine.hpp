#pragma once

// Exact characteristic-function machinery. The conditional characteristic
// functions gamma_{t,j} are represented as Laurent polynomials in z = e(i
// theta), divided by (2 - z^sigma) for the two constant patterns. The vector
// Gamma_t is obtained by descending the pair recursion
//   Lambda_{2t} = D_{2t} Lambda_t,   Lambda_{2t+1} = D_{2t+1} Lambda_t,
// with Lambda_0 = [1; Gamma_1] and Gamma_1 solved from (I - C_1)Gamma = B_1 1.

#include "blockdelta/distribution.hpp"
#include "blockdelta/laurent.hpp"
#include "blockdelta/rational.hpp"
#include "blockdelta/words.hpp"

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace blockdelta {

// one entry gamma_{t,j}: num / (2 - z^sigma)^den_pow, den_pow in {0,1};
// sigma is a property of the pattern and lives in the engine
struct RationalCF {
    LaurentPoly num;
    int den_pow = 0;
};

using CFVector = std::vector<RationalCF>;

// A_t as a sparse monomial matrix: row j holds 1/2 z^{e} at columns
// floor(j/2) and floor(j/2) + 2^{l-2} with e = phi(t, j), phi(t, j + 2^{l-1})
struct TransferMatrix {
    struct Entry {
        std::size_t col;
        int exp;
    };
    unsigned ell = 0;
    std::vector<std::array<Entry, 2>> rows;
};

TransferMatrix build_A(const Pattern& w, const BigInt& t);

// dense l x l LaurentPoly forms of A_t / B_t / C_t (tests and small checks)
std::vector<std::vector<LaurentPoly>> dense_A(const Pattern& w, const BigInt& t);
std::vector<std::vector<LaurentPoly>> dense_B(const Pattern& w, const BigInt& t);
std::vector<std::vector<LaurentPoly>> dense_C(const Pattern& w, const BigInt& t);

class CfEngine {
public:
    explicit CfEngine(const Pattern& w, bool allow_large = false);

    const Pattern& pattern() const { return w_; }
    int sigma() const { return sigma_; }
    std::size_t dim() const { return half_; }

    // Gamma_1; entries are plain Laurent polynomials with exponents in
    // {-1,0,1} except the single pole entry for constant patterns
    const CFVector& gamma1();

    // (Gamma_t, Gamma_{t+1}); memoized along the binary descent path of t
    std::pair<CFVector, CFVector> gamma_pair(const BigInt& t);

    // delta_{t,j} with tail mass <= eps for constant patterns (exact tail
    // recorded); eps must be > 0 for constant w, ignored otherwise
    IntDist dist_conditional(const BigInt& t, std::size_t j, const Rat& eps);

    // delta_t, by the uniform average over residues j
    IntDist dist(const BigInt& t, const Rat& eps);

    // delta_t restricted to |k| <= kmax with the exact remaining mass as
    // tail_bound (constant w); full support for non-constant w
    IntDist dist_k(const BigInt& t, int kmax);

    std::complex<double> eval_cf(const BigInt& t, double theta);

    // exact moments of a single entry, geometric tail included
    Rat entry_mass(const RationalCF& g) const;
    Rat entry_mean(const RationalCF& g) const;
    Rat entry_second_moment(const RationalCF& g) const;

    // acc += coef * z^exp * g, with denominator lifting and normal form
    void cf_accumulate(RationalCF& acc, const RationalCF& g, const Rat& coef, int exp) const;

private:
    using PairNode = std::pair<CFVector, CFVector>;

    CFVector apply_full(const TransferMatrix& A, const CFVector& v) const;
    CFVector apply_split(const TransferMatrix& A, const CFVector& even_src,
                         const CFVector& odd_src) const;
    std::shared_ptr<const PairNode> node(const BigInt& t);
    RationalCF average(const CFVector& v) const;
    IntDist extract(const RationalCF& g, const Rat& eps, const BigInt& t) const;

    Pattern w_;
    int sigma_;
    std::size_t half_;
    CFVector gamma1_;
    bool gamma1_ready_ = false;
    std::mutex mu_;
    std::map<BigInt, std::shared_ptr<const PairNode>> memo_;
};

} // namespace blockdelta
