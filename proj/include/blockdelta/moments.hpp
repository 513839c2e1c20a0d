#pragma once

// Exact first and second moments of the conditional distributions: M_t by
// the prefix-suffix closed form and by the pair recursion, the variance
// vectors V_t, and the scalars v_t, q_t with the exceptional-case classifier.

#include "blockdelta/cfengine.hpp"
#include "blockdelta/rational.hpp"
#include "blockdelta/words.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace blockdelta {

struct MomentVec {
    std::vector<Rat> m; // m_{t,j}, j = 0 .. 2^{l-1}-1
    Rat sum() const;
    Rat max_abs() const;
};

struct VarData {
    std::vector<Rat> v; // v_{t,j}
    std::vector<Rat> u; // u_{t,j} = v_{t,j} - m_{t,j}^2
    Rat v_scalar;       // v_t = average of v_{t,j}
    Rat q_scalar;       // q_t
};

// exceptional cases of the q_t lower bound; everything else is `generic`
// with q_t >= 1/2^{l+1}
enum class QCase { generic, i, ii, iii, iv };
const char* qcase_name(QCase c);

class MomentEngine {
public:
    explicit MomentEngine(const Pattern& w);

    const Pattern& pattern() const { return w_; }

    // closed form via P-set weights (mean_formula2)
    MomentVec mean_vec(const BigInt& t) const;
    // pair recursion M_{2t} = A M_t + U_{2t}, must match mean_vec exactly
    MomentVec mean_vec_rec(const BigInt& t);

    Rat q_scalar(const BigInt& t);
    QCase q_case(const BigInt& t) const;

    VarData var_vec(const BigInt& t);
    Rat variance(const BigInt& t);

    // rows (t, v_t, q_t, occ01(t), lower_bound, upper_bound) for t = 0..tmax
    void write_variance_csv(std::ostream& os, const BigInt& tmax);

    // memo persistence (versioned binary, magic "BDLT1")
    void export_cache(std::ostream& os) const;
    bool import_cache(std::istream& is);

private:
    struct PairNode {
        std::vector<Rat> M0, M1, V0, V1; // at (t, t+1)
    };

    std::vector<Rat> mean_closed(const BigInt& t) const;
    std::vector<Rat> U_vec(const BigInt& t) const;
    std::vector<Rat> Q_vec(const BigInt& t, const std::vector<Rat>& Mlow,
                           const std::vector<Rat>& Mlow1) const;
    std::vector<Rat> apply_full(const TransferMatrix& A, const std::vector<Rat>& x) const;
    std::vector<Rat> apply_split(const TransferMatrix& A, const std::vector<Rat>& even_src,
                                 const std::vector<Rat>& odd_src) const;
    std::shared_ptr<const PairNode> node(const BigInt& t);

    Pattern w_;
    std::size_t half_;
    CfEngine cf_; // supplies the exact Gamma_1 moments for the base case
    mutable std::mutex mu_;
    std::map<BigInt, std::shared_ptr<const PairNode>> memo_;
};

} // namespace blockdelta
