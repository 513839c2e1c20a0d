#include "blockdelta/cfengine.hpp"

#include "blockdelta/direct.hpp"

#include <sstream>

namespace blockdelta {

namespace {

std::size_t bit_reverse(std::size_t x, unsigned nbits) {
    std::size_t r = 0;
    for (unsigned i = 0; i < nbits; ++i) {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    return r;
}

} // namespace

TransferMatrix build_A(const Pattern& w, const BigInt& t) {
    const unsigned ell = w.length();
    const std::size_t half = std::size_t(1) << (ell - 1);
    const std::size_t quarter = half >> 1;
    TransferMatrix A;
    A.ell = ell;
    A.rows.resize(half);
    const std::uint64_t tm = mpz_fdiv_ui(t.get_mpz_t(), 1ul << ell);
    for (std::size_t j = 0; j < half; ++j) {
        A.rows[j][0] = {j / 2, phi_step_u(w, tm, j)};
        A.rows[j][1] = {j / 2 + quarter, phi_step_u(w, tm, j + half)};
    }
    return A;
}

namespace {

std::vector<std::vector<LaurentPoly>> dense_from(const Pattern& w, const BigInt& t, int keep_parity) {
    const TransferMatrix A = build_A(w, t);
    const std::size_t half = A.rows.size();
    std::vector<std::vector<LaurentPoly>> M(half, std::vector<LaurentPoly>(half));
    for (std::size_t j = 0; j < half; ++j) {
        if (keep_parity >= 0 && static_cast<int>(j & 1) != keep_parity) continue;
        for (const auto& ent : A.rows[j])
            M[j][ent.col].add_term(ent.exp, Rat(1, 2));
    }
    return M;
}

} // namespace

std::vector<std::vector<LaurentPoly>> dense_A(const Pattern& w, const BigInt& t) {
    return dense_from(w, t, -1);
}
std::vector<std::vector<LaurentPoly>> dense_B(const Pattern& w, const BigInt& t) {
    return dense_from(w, t, 0);
}
std::vector<std::vector<LaurentPoly>> dense_C(const Pattern& w, const BigInt& t) {
    return dense_from(w, t, 1);
}

CfEngine::CfEngine(const Pattern& w, bool allow_large)
    : w_(w), sigma_(w.sigma() == 0 ? +1 : w.sigma()),
      half_(std::size_t(1) << (w.length() - 1)) {
    if (w.length() > 12 && !allow_large)
        throw ResourceError("CfEngine: matrix size 2^" + std::to_string(w.length() - 1) +
                            " exceeds the default cap (pass allow_large to override)");
}

void CfEngine::cf_accumulate(RationalCF& acc, const RationalCF& g, const Rat& coef, int exp) const {
    if (acc.den_pow == g.den_pow) {
        acc.num.add_scaled(g.num, coef, exp);
    } else if (acc.den_pow > g.den_pow) {
        // lift g by (2 - z^sigma)
        acc.num.add_scaled(g.num, 2 * coef, exp);
        acc.num.add_scaled(g.num, -coef, exp + sigma_);
    } else {
        LaurentPoly lifted;
        lifted.add_scaled(acc.num, Rat(2), 0);
        lifted.add_scaled(acc.num, Rat(-1), sigma_);
        lifted.add_scaled(g.num, coef, exp);
        acc.num = std::move(lifted);
        acc.den_pow = g.den_pow;
    }
    if (acc.den_pow == 1) {
        if (auto q = acc.num.divide_once(sigma_)) {
            acc.num = std::move(*q);
            acc.den_pow = 0;
        }
    }
}

const CFVector& CfEngine::gamma1() {
    std::lock_guard<std::mutex> lock(mu_);
    if (gamma1_ready_) return gamma1_;

    const TransferMatrix A1 = build_A(w_, BigInt(1));
    CFVector gam(half_);
    std::vector<bool> done(half_, false);

    // rhs = B_1 * 1 (even rows of A_1 summed)
    CFVector rhs(half_);
    for (std::size_t j = 0; j < half_; j += 2)
        for (const auto& ent : A1.rows[j])
            rhs[j].num.add_term(ent.exp, Rat(1, 2));

    // The bit-reversal permutation makes I - C_1 lower triangular; a single
    // forward-substitution pass solves the system. The only diagonal entry
    // contributed by C_1 sits in the last row.
    const unsigned nbits = w_.length() - 1;
    for (std::size_t i = 0; i < half_; ++i) {
        const std::size_t j = bit_reverse(i, nbits);
        RationalCF acc = rhs[j];
        bool has_diag = false;
        int diag_exp = 0;
        if (j % 2 == 1) {
            for (const auto& ent : A1.rows[j]) {
                if (ent.col == j) {
                    has_diag = true;
                    diag_exp = ent.exp;
                } else {
                    if (!done[ent.col])
                        throw std::logic_error("gamma1: triangular order violated");
                    cf_accumulate(acc, gam[ent.col], Rat(1, 2), ent.exp);
                }
            }
        }
        if (!has_diag) {
            gam[j] = std::move(acc);
        } else if (diag_exp == 0) {
            // (1 - 1/2) gamma_j = acc
            acc.num.scale(Rat(2));
            gam[j] = std::move(acc);
        } else {
            // (1 - z^e/2) gamma_j = acc  ->  gamma_j = 2 acc / (2 - z^e)
            if (diag_exp != sigma_ || acc.den_pow != 0)
                throw std::logic_error("gamma1: unexpected pole structure");
            acc.num.scale(Rat(2));
            if (auto q = acc.num.divide_once(sigma_)) {
                gam[j] = {std::move(*q), 0};
            } else {
                gam[j] = {std::move(acc.num), 1};
            }
        }
        done[j] = true;
    }
    gamma1_ = std::move(gam);
    gamma1_ready_ = true;
    return gamma1_;
}

CFVector CfEngine::apply_full(const TransferMatrix& A, const CFVector& v) const {
    CFVector out(half_);
    for (std::size_t j = 0; j < half_; ++j)
        for (const auto& ent : A.rows[j])
            cf_accumulate(out[j], v[ent.col], Rat(1, 2), ent.exp);
    return out;
}

CFVector CfEngine::apply_split(const TransferMatrix& A, const CFVector& even_src,
                               const CFVector& odd_src) const {
    CFVector out(half_);
    for (std::size_t j = 0; j < half_; ++j) {
        const CFVector& src = (j % 2 == 0) ? even_src : odd_src;
        for (const auto& ent : A.rows[j])
            cf_accumulate(out[j], src[ent.col], Rat(1, 2), ent.exp);
    }
    return out;
}

std::shared_ptr<const CfEngine::PairNode> CfEngine::node(const BigInt& t) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(t);
        if (it != memo_.end()) return it->second;
    }
    std::shared_ptr<const PairNode> result;
    if (t == 0) {
        CFVector ones(half_);
        for (auto& g : ones) g.num.add_term(0, Rat(1));
        result = std::make_shared<PairNode>(ones, gamma1());
    } else {
        const BigInt s = t >> 1;
        auto low = node(s);
        const bool even = mpz_tstbit(t.get_mpz_t(), 0) == 0;
        CFVector gt, gt1;
        if (even) {
            gt = apply_full(build_A(w_, t), low->first);
            gt1 = apply_split(build_A(w_, t + 1), low->first, low->second);
        } else {
            gt = apply_split(build_A(w_, t), low->first, low->second);
            gt1 = apply_full(build_A(w_, t + 1), low->second);
        }
        result = std::make_shared<PairNode>(std::move(gt), std::move(gt1));
    }
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = memo_.emplace(t, result);
    return it->second; // first writer wins; concurrent inserts compute equal values
}

std::pair<CFVector, CFVector> CfEngine::gamma_pair(const BigInt& t) {
    if (t < 0) throw std::invalid_argument("gamma_pair: t must be nonnegative");
    return *node(t);
}

RationalCF CfEngine::average(const CFVector& v) const {
    RationalCF acc;
    const Rat inv(1, static_cast<unsigned long>(half_));
    for (const auto& g : v) cf_accumulate(acc, g, inv, 0);
    return acc;
}

IntDist CfEngine::extract(const RationalCF& g, const Rat& eps, const BigInt& t) const {
    IntDist out{w_, t, {}, Rat(0)};
    if (g.den_pow == 0) {
        for (const auto& [e, c] : g.num.terms())
            out.probs[e] = c;
        return out;
    }
    if (eps <= 0)
        throw std::invalid_argument("dist: tail tolerance eps must be positive for constant patterns");
    // num / (2 - z^sigma): coefficient at k is sum_m num_{k - sigma m} / 2^{m+1};
    // expand outward along sigma until the exact remaining mass is <= eps
    const Rat total = g.num.value_at_one();
    const int lo = g.num.min_exp(), hi = g.num.max_exp();
    Rat kept = 0;
    long long k = (sigma_ > 0) ? lo : hi;
    for (;;) {
        Rat c = 0;
        for (const auto& [e, ce] : g.num.terms()) {
            const long long m = (k - e) * sigma_;
            if (m >= 0) c += ce * pow2_rat(-(m + 1));
        }
        if (c != 0) {
            out.probs[k] = c;
            kept += c;
        }
        const bool past_finite_side = (sigma_ > 0) ? (k >= hi) : (k <= lo);
        if (past_finite_side && total - kept <= eps) break;
        k += sigma_;
        if (std::abs(k) > (1 << 24))
            throw std::logic_error("dist: runaway expansion");
    }
    out.tail_bound = total - kept;
    return out;
}

IntDist CfEngine::dist_conditional(const BigInt& t, std::size_t j, const Rat& eps) {
    if (j >= half_) throw std::invalid_argument("dist_conditional: residue out of range");
    return extract(gamma_pair(t).first[j], eps, t);
}

IntDist CfEngine::dist(const BigInt& t, const Rat& eps) {
    return extract(average(gamma_pair(t).first), eps, t);
}

IntDist CfEngine::dist_k(const BigInt& t, int kmax) {
    const RationalCF g = average(gamma_pair(t).first);
    IntDist out{w_, t, {}, Rat(0)};
    if (g.den_pow == 0) {
        for (const auto& [e, c] : g.num.terms())
            out.probs[e] = c;
        return out;
    }
    Rat kept = 0;
    for (long long k = -kmax; k <= kmax; ++k) {
        Rat c = 0;
        for (const auto& [e, ce] : g.num.terms()) {
            const long long m = (k - e) * sigma_;
            if (m >= 0) c += ce * pow2_rat(-(m + 1));
        }
        if (c != 0) {
            out.probs[k] = c;
            kept += c;
        }
    }
    out.tail_bound = g.num.value_at_one() - kept;
    return out;
}

std::complex<double> CfEngine::eval_cf(const BigInt& t, double theta) {
    const CFVector& gt = gamma_pair(t).first;
    std::complex<double> s = 0;
    for (const auto& g : gt) {
        std::complex<double> v = g.num.eval_unit(theta);
        if (g.den_pow == 1)
            v /= (2.0 - std::polar(1.0, sigma_ * theta));
        s += v;
    }
    return s / static_cast<double>(half_);
}

Rat CfEngine::entry_mass(const RationalCF& g) const {
    return g.num.value_at_one(); // (2 - z^sigma) = 1 at z = 1
}

Rat CfEngine::entry_mean(const RationalCF& g) const {
    Rat s = 0;
    if (g.den_pow == 0) {
        for (const auto& [e, c] : g.num.terms()) s += c * Rat(e);
    } else {
        // sum_m (a + sigma m)/2^{m+1} = a + sigma
        for (const auto& [e, c] : g.num.terms()) s += c * Rat(e + sigma_);
    }
    return s;
}

Rat CfEngine::entry_second_moment(const RationalCF& g) const {
    Rat s = 0;
    if (g.den_pow == 0) {
        for (const auto& [e, c] : g.num.terms()) s += c * Rat(e) * Rat(e);
    } else {
        // sum_m (a + sigma m)^2/2^{m+1} = a^2 + 2 sigma a + 3
        for (const auto& [e, c] : g.num.terms())
            s += c * (Rat(e) * Rat(e) + Rat(2 * sigma_ * e) + Rat(3));
    }
    return s;
}

std::string IntDist::to_json() const {
    std::ostringstream os;
    os << "{\"w\":\"" << w.str() << "\",\"t\":\"" << t.get_str() << "\",\"support\":[";
    bool first = true;
    for (const auto& [k, p] : probs) {
        if (!first) os << ',';
        first = false;
        os << '[' << k << ",\"" << rat_str(p) << "\"]";
    }
    os << "],\"tail_bound\":\"" << rat_str(tail_bound) << "\"}";
    return os.str();
}

} // namespace blockdelta
