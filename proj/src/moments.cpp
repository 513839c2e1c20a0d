#include "blockdelta/moments.hpp"

#include "blockdelta/direct.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace blockdelta {

Rat MomentVec::sum() const {
    Rat s = 0;
    for (const auto& x : m) s += x;
    return s;
}

Rat MomentVec::max_abs() const {
    Rat b = 0;
    for (const auto& x : m) b = std::max(b, Rat(abs(x)));
    return b;
}

const char* qcase_name(QCase c) {
    switch (c) {
        case QCase::generic: return "generic";
        case QCase::i: return "i";
        case QCase::ii: return "ii";
        case QCase::iii: return "iii";
        case QCase::iv: return "iv";
    }
    return "?";
}

MomentEngine::MomentEngine(const Pattern& w)
    : w_(w), half_(std::size_t(1) << (w.length() - 1)), cf_(w) {}

std::vector<Rat> MomentEngine::mean_closed(const BigInt& t) const {
    const unsigned width = w_.length() - 1;
    const unsigned long half = 1ul << width;
    const std::uint64_t tmod = mpz_fdiv_ui(t.get_mpz_t(), half);
    std::vector<Rat> out(half_);
    const Rat scale = pow2_rat(-static_cast<long>(width));
    for (unsigned long j = 0; j < half; ++j) {
        const auto x = DigitString::from_value(BigInt(j), width);
        const auto y = DigitString::from_value(BigInt((j + tmod) % half), width);
        out[j] = scale * Rat(prefix_suffix_weight(y, w_) - prefix_suffix_weight(x, w_));
    }
    return out;
}

MomentVec MomentEngine::mean_vec(const BigInt& t) const { return {mean_closed(t)}; }

std::vector<Rat> MomentEngine::U_vec(const BigInt& t) const {
    std::vector<Rat> u(half_);
    for (std::size_t j = 0; j < half_; ++j)
        u[j] = Rat(phi_step(w_, t, BigInt(static_cast<unsigned long>(j))) +
                   phi_step(w_, t, BigInt(static_cast<unsigned long>(j + half_)))) /
               2;
    return u;
}

std::vector<Rat> MomentEngine::Q_vec(const BigInt& t, const std::vector<Rat>& Mlow,
                                     const std::vector<Rat>& Mlow1) const {
    // Q_t = -2i A'_t(0) M - A''_t(0) 1 with entries formed directly from the
    // phi positions; odd rows read M_{s+1} when t is odd
    const TransferMatrix A = build_A(w_, t);
    const bool t_even = mpz_tstbit(t.get_mpz_t(), 0) == 0;
    std::vector<Rat> q(half_);
    for (std::size_t j = 0; j < half_; ++j) {
        const std::vector<Rat>& src = (t_even || j % 2 == 0) ? Mlow : Mlow1;
        const auto& [e0, e1] = std::pair(A.rows[j][0], A.rows[j][1]);
        q[j] = Rat(e0.exp) * src[e0.col] + Rat(e1.exp) * src[e1.col] +
               Rat(e0.exp * e0.exp + e1.exp * e1.exp) / 2;
    }
    return q;
}

std::vector<Rat> MomentEngine::apply_full(const TransferMatrix& A, const std::vector<Rat>& x) const {
    std::vector<Rat> out(half_);
    for (std::size_t j = 0; j < half_; ++j)
        out[j] = (x[A.rows[j][0].col] + x[A.rows[j][1].col]) / 2;
    return out;
}

std::vector<Rat> MomentEngine::apply_split(const TransferMatrix& A, const std::vector<Rat>& even_src,
                                           const std::vector<Rat>& odd_src) const {
    std::vector<Rat> out(half_);
    for (std::size_t j = 0; j < half_; ++j) {
        const auto& src = (j % 2 == 0) ? even_src : odd_src;
        out[j] = (src[A.rows[j][0].col] + src[A.rows[j][1].col]) / 2;
    }
    return out;
}

std::shared_ptr<const MomentEngine::PairNode> MomentEngine::node(const BigInt& t) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(t);
        if (it != memo_.end()) return it->second;
    }
    std::shared_ptr<const PairNode> result;
    if (t == 0) {
        auto n = std::make_shared<PairNode>();
        n->M0.assign(half_, Rat(0));
        n->V0.assign(half_, Rat(0));
        const CFVector& g1 = cf_.gamma1();
        n->M1.resize(half_);
        n->V1.resize(half_);
        for (std::size_t j = 0; j < half_; ++j) {
            n->M1[j] = cf_.entry_mean(g1[j]);
            n->V1[j] = cf_.entry_second_moment(g1[j]);
        }
        result = n;
    } else {
        const BigInt s = t >> 1;
        auto low = node(s);
        const bool even = mpz_tstbit(t.get_mpz_t(), 0) == 0;
        auto n = std::make_shared<PairNode>();

        auto step_even = [&](const BigInt& tt, const std::vector<Rat>& Ms,
                             const std::vector<Rat>& Vs,
                             std::vector<Rat>& Mo, std::vector<Rat>& Vo) {
            const TransferMatrix A = build_A(w_, tt);
            Mo = apply_full(A, Ms);
            Vo = apply_full(A, Vs);
            const auto u = U_vec(tt);
            const auto q = Q_vec(tt, Ms, Ms);
            for (std::size_t j = 0; j < half_; ++j) {
                Mo[j] += u[j];
                Vo[j] += q[j];
            }
        };
        auto step_odd = [&](const BigInt& tt, const PairNode& lo,
                            std::vector<Rat>& Mo, std::vector<Rat>& Vo) {
            const TransferMatrix A = build_A(w_, tt);
            Mo = apply_split(A, lo.M0, lo.M1);
            Vo = apply_split(A, lo.V0, lo.V1);
            const auto u = U_vec(tt);
            const auto q = Q_vec(tt, lo.M0, lo.M1);
            for (std::size_t j = 0; j < half_; ++j) {
                Mo[j] += u[j];
                Vo[j] += q[j];
            }
        };

        if (even) {
            step_even(t, low->M0, low->V0, n->M0, n->V0);
            step_odd(t + 1, *low, n->M1, n->V1);
        } else {
            step_odd(t, *low, n->M0, n->V0);
            // t+1 = 2(s+1): the even rule applied to the upper half of the pair
            step_even(t + 1, low->M1, low->V1, n->M1, n->V1);
        }
        result = n;
    }
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = memo_.emplace(t, result);
    return it->second;
}

MomentVec MomentEngine::mean_vec_rec(const BigInt& t) { return {node(t)->M0}; }

Rat MomentEngine::q_scalar(const BigInt& t) {
    const unsigned long mod = 1ul << w_.length();
    if (mpz_fdiv_ui(t.get_mpz_t(), mod) == 0) return Rat(0);
    auto low = node(t >> 1);
    const auto q = Q_vec(t, low->M0, low->M1);
    Rat s = 0;
    for (const auto& x : q) s += x;
    return s * pow2_rat(-static_cast<long>(w_.length() - 1));
}

QCase MomentEngine::q_case(const BigInt& t) const {
    const unsigned ell = w_.length();
    const std::uint64_t mod = 1ull << ell;
    const std::uint64_t tm = mpz_fdiv_ui(t.get_mpz_t(), mod);
    if (tm == 0) return QCase::i;

    const std::string ws = w_.str();
    const auto rep = [](char c, unsigned n) { return std::string(n, c); };
    const bool run_pat = ws == "0" + rep('1', ell - 1) || ws == "1" + rep('0', ell - 1);
    const std::uint64_t halfp = 1ull << (ell - 1);
    if (run_pat) {
        if (tm == halfp) return QCase::ii;
        if (tm == halfp - 1 || tm == halfp + 1) return QCase::iii;
    }
    const bool pair_pat = ws == "00" + rep('1', ell - 2) || ws == "01" + rep('0', ell - 2) ||
                          ws == "10" + rep('1', ell - 2) || ws == "11" + rep('0', ell - 2);
    const std::uint64_t quarter = 1ull << (ell - 2);
    if (pair_pat && (tm == quarter % mod || tm == (mod - quarter) % mod))
        return QCase::iv;
    return QCase::generic;
}

VarData MomentEngine::var_vec(const BigInt& t) {
    auto n = node(t);
    VarData out;
    out.v = n->V0;
    out.u.resize(half_);
    for (std::size_t j = 0; j < half_; ++j)
        out.u[j] = n->V0[j] - n->M0[j] * n->M0[j];
    Rat s = 0;
    for (const auto& x : out.v) s += x;
    out.v_scalar = s * pow2_rat(-static_cast<long>(w_.length() - 1));
    out.q_scalar = q_scalar(t);
    return out;
}

Rat MomentEngine::variance(const BigInt& t) {
    auto n = node(t);
    Rat s = 0;
    for (const auto& x : n->V0) s += x;
    return s * pow2_rat(-static_cast<long>(w_.length() - 1));
}

void MomentEngine::write_variance_csv(std::ostream& os, const BigInt& tmax) {
    const unsigned ell = w_.length();
    const Rat lo_c = pow2_rat(-2 * static_cast<long>(ell - 1));
    const Rat hi_c = Rat(3 * (ell + 2)) * pow2_rat(-(static_cast<long>(ell) - 2));
    os << "t,v_t,q_t,occ01,lower_bound,upper_bound\r\n";
    for (BigInt t = 0; t <= tmax; ++t) {
        const long n01 = blocks01(t);
        os << t.get_str() << ',' << rat_str(variance(t)) << ',' << rat_str(q_scalar(t))
           << ',' << n01 << ',' << rat_str(lo_c * n01) << ',' << rat_str(hi_c * n01)
           << "\r\n";
    }
}

// --- cache persistence -----------------------------------------------------
// layout: "BDLT1" magic, u32 version, pattern string, u64 node count, then
// per node: t and the four vectors, rationals as length-prefixed strings.

namespace {

void put_str(std::ostream& os, const std::string& s) {
    const std::uint64_t n = s.size();
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(s.data(), static_cast<std::streamsize>(n));
}

bool get_str(std::istream& is, std::string& s) {
    std::uint64_t n = 0;
    if (!is.read(reinterpret_cast<char*>(&n), sizeof n)) return false;
    if (n > (1u << 24)) return false;
    s.resize(n);
    return static_cast<bool>(is.read(s.data(), static_cast<std::streamsize>(n)));
}

} // namespace

void MomentEngine::export_cache(std::ostream& os) const {
    std::lock_guard<std::mutex> lock(mu_);
    os.write("BDLT1", 5);
    const std::uint32_t version = 1;
    os.write(reinterpret_cast<const char*>(&version), sizeof version);
    put_str(os, w_.str());
    const std::uint64_t count = memo_.size();
    os.write(reinterpret_cast<const char*>(&count), sizeof count);
    for (const auto& [t, nptr] : memo_) {
        put_str(os, t.get_str());
        for (const auto* vec : {&nptr->M0, &nptr->M1, &nptr->V0, &nptr->V1})
            for (const auto& r : *vec) put_str(os, r.get_str());
    }
}

bool MomentEngine::import_cache(std::istream& is) {
    char magic[5];
    if (!is.read(magic, 5) || std::string(magic, 5) != "BDLT1") return false;
    std::uint32_t version = 0;
    if (!is.read(reinterpret_cast<char*>(&version), sizeof version) || version != 1) return false;
    std::string ws;
    if (!get_str(is, ws) || ws != w_.str()) return false;
    std::uint64_t count = 0;
    if (!is.read(reinterpret_cast<char*>(&count), sizeof count)) return false;
    std::map<BigInt, std::shared_ptr<const PairNode>> loaded;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string ts;
        if (!get_str(is, ts)) return false;
        auto n = std::make_shared<PairNode>();
        for (auto* vec : {&n->M0, &n->M1, &n->V0, &n->V1}) {
            vec->resize(half_);
            for (std::size_t j = 0; j < half_; ++j) {
                std::string rs;
                if (!get_str(is, rs)) return false;
                (*vec)[j] = Rat(rs);
            }
        }
        loaded.emplace(BigInt(ts), std::move(n));
    }
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& [t, n] : loaded) memo_.emplace(t, std::move(n));
    return true;
}

} // namespace blockdelta
