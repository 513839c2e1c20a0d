#include "blockdelta/direct.hpp"

#include <algorithm>
#include <sstream>
#include <thread>
#include <vector>

namespace blockdelta {

namespace {

constexpr int kLambdaCap = 30;
constexpr int kEnumTBits = 48; // per-n enumeration requires t < 2^48

bool fits_u64(const BigInt& t) { return t >= 0 && bit_length(t) <= kEnumTBits; }

// d for machine-word n (full evaluation through the canonical expansions)
inline long occ_diff_u64(const Pattern& w, std::uint64_t t, std::uint64_t n) {
    const int ell = static_cast<int>(w.length());
    const std::uint64_t wv = w.value();
    const std::uint64_t m = n + t;
    long v = count_occ_u64(m, bit_length_u64(m) + ell - 1, wv, ell) -
             count_occ_u64(n, bit_length_u64(n) + ell - 1, wv, ell);
    if (w.is_constant() && w.word()[0] == 0)
        v += bit_length_u64(n) - bit_length_u64(m);
    return v;
}

} // namespace

int phi_step(const Pattern& w, const BigInt& t, const BigInt& n) {
    const unsigned long mod = 1ul << w.length();
    const std::uint64_t tm = mpz_fdiv_ui(t.get_mpz_t(), mod);
    const std::uint64_t nm = mpz_fdiv_ui(n.get_mpz_t(), mod);
    const std::uint64_t target = (w.value() + mod - nm) & (mod - 1);
    if (tm == target && target != 0) return 1;
    if (tm != target && target == 0) return -1;
    return 0;
}

int phi_step_u(const Pattern& w, std::uint64_t t, std::uint64_t n) {
    const std::uint64_t mod = 1ull << w.length();
    const std::uint64_t tm = t & (mod - 1);
    const std::uint64_t target = (w.value() + mod - (n & (mod - 1))) & (mod - 1);
    if (tm == target && target != 0) return 1;
    if (tm != target && target == 0) return -1;
    return 0;
}

long occ_diff(const Pattern& w, const BigInt& t, const BigInt& n) {
    const BigInt m = n + t;
    long v = occ(w, m) - occ(w, n);
    if (w.is_constant() && w.word()[0] == 0)
        v += bit_length(n) - bit_length(m);
    return v;
}

long occ_diff_window(const Pattern& w, const DigitString& u,
                     const DigitString& x, const DigitString& z) {
    if (u.size() != w.length() - 1)
        throw std::invalid_argument("occ_diff_window: |u| must equal l-1");
    if (x.size() != z.size())
        throw std::invalid_argument("occ_diff_window: |x| must equal |z|");
    return count_occurrences(concat(u, z), w) - count_occurrences(concat(u, x), w);
}

int exact_lambda(const Pattern& w, const BigInt& t, int kmax) {
    const int h = static_cast<int>(bit_length(t));
    const int ell = static_cast<int>(w.length());
    if (!w.is_constant()) return h + ell + 1;
    return 2 * h + std::max(kmax, 0) + 2 * (ell - 1);
}

// ---------------------------------------------------------------------------
// exact_dist: enumerate the partition of N into the windows
//   (I)  suffix u x          with |x| = h, [x]_2 + t < 2^h
//   (II) suffix u 0 1^s y    with |y| = h, [y]_2 + t >= 2^h
// and read off d from the corresponding no-carry window pair.
// ---------------------------------------------------------------------------

namespace {

struct Accum {
    bool restrict_k; // constant w: keep only |k| <= kmax
    int kmax;
    std::map<long long, Rat> probs;
    Rat kept = 0;

    void add(long long k, const Rat& mass) {
        if (restrict_k && (k > kmax || k < -kmax)) return;
        auto [it, ins] = probs.emplace(k, mass);
        if (!ins) it->second += mass;
        kept += mass;
    }
};

// run-sum of (len - l + 1)^+ over maximal runs of digit c in the low `width`
// bits of `win`
inline long run_occ_u64(std::uint64_t win, int width, int c, int ell) {
    long total = 0;
    int run = 0;
    for (int i = width - 1; i >= 0; --i) {
        const int b = static_cast<int>((win >> i) & 1);
        if (b == c) {
            ++run;
        } else {
            if (run >= ell) total += run - ell + 1;
            run = 0;
        }
    }
    if (run >= ell) total += run - ell + 1;
    return total;
}

inline int leading_run_u64(std::uint64_t win, int width, int c) {
    int r = 0;
    for (int i = width - 1; i >= 0; --i) {
        if (static_cast<int>((win >> i) & 1) == c) ++r;
        else break;
    }
    return r;
}

inline int trailing_run_u64(std::uint64_t win, int width, int c) {
    int r = 0;
    for (int i = 0; i < width; ++i) {
        if (static_cast<int>((win >> i) & 1) == c) ++r;
        else break;
    }
    return r;
}

} // namespace

IntDist exact_dist(const Pattern& w, const BigInt& t, int kmax) {
    IntDist out{w, t, {}, Rat(0)};
    if (t == 0) {
        out.probs[0] = 1;
        return out;
    }
    if (!fits_u64(t))
        throw ResourceError("exact_dist: t exceeds the enumeration budget");
    const std::uint64_t tt = t.get_ui();
    const int h = bit_length_u64(tt);
    const int ell = static_cast<int>(w.length());
    const std::uint64_t wv = w.value();
    const int half_bits = ell - 1;
    if (h + half_bits > 26)
        throw ResourceError("exact_dist: 2^{h+l-1} window table exceeds the budget");

    Accum acc{w.is_constant(), kmax, {}, Rat(0)};

    // case (I): no carry out of the h-digit suffix
    const std::uint64_t xlim = (h >= 64 ? 0 : (1ull << h)) - tt; // 2^h - t
    const Rat mass1 = pow2_rat(-(h + ell - 1));
    for (std::uint64_t u = 0; u < (1ull << half_bits); ++u) {
        const std::uint64_t ubase = u << h;
        for (std::uint64_t x = 0; x < xlim; ++x) {
            const std::uint64_t z = x + tt;
            const long d = count_occ_u64(ubase | z, h + half_bits, wv, ell) -
                           count_occ_u64(ubase | x, h + half_bits, wv, ell);
            acc.add(d, mass1);
        }
    }

    // case (II): suffix u 0 1^s y, carry turns it into u 1 0^s z
    const int S_nc = 2 * ell - 2; // non-constant w: values are constant for s >= S_nc
    const int c = static_cast<int>(w.word()[0]); // run digit for constant w
    for (std::uint64_t y = xlim; y < (1ull << h); ++y) {
        const std::uint64_t z = y + tt - (1ull << h);
        for (std::uint64_t u = 0; u < (1ull << half_bits); ++u) {
            if (!w.is_constant()) {
                for (int s = 0; s <= S_nc; ++s) {
                    const int width = ell + s + h;
                    if (width > 63)
                        throw ResourceError("exact_dist: window exceeds 63 bits");
                    const std::uint64_t w1 = (((u << 1) | 1) << (s + h)) | z;
                    const std::uint64_t ones = s == 0 ? 0 : ((1ull << s) - 1) << h;
                    const std::uint64_t w2 = ((u << 1) << (s + h)) | ones | y;
                    const long d = count_occ_u64(w1, width, wv, ell) -
                                   count_occ_u64(w2, width, wv, ell);
                    const Rat mass = (s < S_nc) ? pow2_rat(-(h + s + ell))
                                                : pow2_rat(-(h + S_nc + ell - 1));
                    acc.add(d, mass);
                }
            } else {
                // s = 0 window directly
                {
                    const std::uint64_t w1 = (((u << 1) | 1) << h) | z;
                    const std::uint64_t w2 = ((u << 1) << h) | y;
                    const long d = count_occ_u64(w1, ell + h, wv, ell) -
                                   count_occ_u64(w2, ell + h, wv, ell);
                    acc.add(d, pow2_rat(-(h + ell)));
                }
                // s >= 1: maximal-run decomposition, d moves by one digit of
                // the run per step once the merged run reaches length l
                long d1, base2;
                if (c == 1) {
                    // w = 1^l: |u 1 0^s z| is independent of s >= 1
                    const int ru = trailing_run_u64(u, half_bits, 1) + 1;
                    d1 = std::max<long>(0, ru - ell + 1) + run_occ_u64(z, h, 1, ell);
                    const int a = leading_run_u64(y, h, 1);
                    const std::uint64_t yrest_mask = a >= h ? 0 : ((1ull << (h - a)) - 1);
                    base2 = run_occ_u64(y & yrest_mask, h - a, 1, ell);
                    for (int s = 1;; ++s) {
                        const long grow = std::max<long>(0, s + a - ell + 1);
                        const long d = d1 - (grow + base2);
                        if (s > 1 && d < -kmax) break;
                        acc.add(d, pow2_rat(-(h + s + ell)));
                        if (s > 4 * (ell + h + kmax + 4)) break; // unreachable guard
                    }
                } else {
                    // w = 0^l: |u 0 1^s y| is independent of s >= 1
                    const int tz = trailing_run_u64(u, half_bits, 0) + 1;
                    base2 = std::max<long>(0, tz - ell + 1) + run_occ_u64(y, h, 0, ell);
                    const int b = leading_run_u64(z, h, 0);
                    const std::uint64_t zrest_mask = b >= h ? 0 : ((1ull << (h - b)) - 1);
                    const long zrest = run_occ_u64(z & zrest_mask, h - b, 0, ell);
                    for (int s = 1;; ++s) {
                        const long grow = std::max<long>(0, s + b - ell + 1);
                        const long d = grow + zrest - base2;
                        if (s > 1 && d > kmax) break;
                        acc.add(d, pow2_rat(-(h + s + ell)));
                        if (s > 4 * (ell + h + kmax + 4)) break;
                    }
                }
            }
        }
    }

    out.probs = std::move(acc.probs);
    if (w.is_constant()) out.tail_bound = Rat(1) - acc.kept;
    return out;
}

// ---------------------------------------------------------------------------
// empirical_dist: literal counting over n in [0, 2^lambda)
// ---------------------------------------------------------------------------

namespace {

using CountMap = std::map<long long, std::uint64_t>;

void merge_counts(CountMap& into, const CountMap& from) {
    for (const auto& [k, c] : from) into[k] += c;
}

// plain per-n path over [lo, hi)
CountMap enumerate_plain(const Pattern& w, std::uint64_t t, std::uint64_t lo, std::uint64_t hi) {
    CountMap counts;
    for (std::uint64_t n = lo; n < hi; ++n)
        ++counts[occ_diff_u64(w, t, n)];
    return counts;
}

// grouped path: d depends only on the low m digits unless the carry escapes
// the (m-l+1)-digit suffix; escaped residues are enumerated directly
CountMap enumerate_grouped(const Pattern& w, std::uint64_t t, int lambda, int m,
                           std::uint64_t Llo, std::uint64_t Lhi) {
    CountMap counts;
    const int ell = static_cast<int>(w.length());
    const int xw = m - (ell - 1);
    const std::uint64_t xmask = (1ull << xw) - 1;
    const std::uint64_t wv = w.value();
    const std::uint64_t reps = 1ull << (lambda - m);
    for (std::uint64_t L = Llo; L < Lhi; ++L) {
        const std::uint64_t x = L & xmask;
        if (x + t < (1ull << xw)) {
            const std::uint64_t ub = (L >> xw) << xw;
            const long d = count_occ_u64(ub | (x + t), m, wv, ell) -
                           count_occ_u64(L, m, wv, ell);
            counts[d] += reps;
        } else {
            for (std::uint64_t v = 0; v < reps; ++v)
                ++counts[occ_diff_u64(w, t, (v << m) | L)];
        }
    }
    return counts;
}

} // namespace

OracleResult empirical_dist(const Pattern& w, const BigInt& t, int lambda, int threads) {
    const int ell = static_cast<int>(w.length());
    if (lambda < ell - 1)
        throw std::invalid_argument("empirical_dist: lambda must be at least l-1");
    if (lambda > kLambdaCap)
        throw ResourceError("empirical_dist: lambda exceeds the enumeration budget (" +
                            std::to_string(kLambdaCap) + ")");
    if (!fits_u64(t))
        throw ResourceError("empirical_dist: t exceeds the enumeration budget");

    OracleResult res{w, t, lambda, false, 10, {}};
    const std::uint64_t tt = t.get_ui();
    const std::uint64_t total = 1ull << lambda;

    if (tt == 0) {
        res.counts[0] = total;
        res.exact = true;
        return res;
    }

    const int h = bit_length_u64(tt);
    const int m = std::min(lambda, h + (ell - 1) + 9);
    const bool grouped = lambda > m && lambda > 20;
    threads = std::max(1, std::min(threads, 64));

    std::vector<CountMap> parts(static_cast<std::size_t>(threads));
    const std::uint64_t span = grouped ? (1ull << m) : total;
    {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (span + threads - 1) / threads;
        for (int i = 0; i < threads; ++i) {
            const std::uint64_t lo = std::min<std::uint64_t>(span, i * chunk);
            const std::uint64_t hi = std::min<std::uint64_t>(span, lo + chunk);
            if (lo >= hi) continue;
            pool.emplace_back([&, i, lo, hi] {
                parts[static_cast<std::size_t>(i)] =
                    grouped ? enumerate_grouped(w, tt, lambda, m, lo, hi)
                            : enumerate_plain(w, tt, lo, hi);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& p : parts) merge_counts(res.counts, p);

    // certification against the exact progression-family distribution
    try {
        const IntDist ref = exact_dist(w, t, res.kmax);
        bool ok = true;
        if (!w.is_constant()) {
            ok = res.counts.size() == ref.probs.size();
            for (const auto& [k, p] : ref.probs) {
                if (!ok) break;
                auto it = res.counts.find(k);
                ok = it != res.counts.end() && Rat(it->second) == p * Rat(BigInt(total));
            }
        } else {
            for (long long k = -res.kmax; ok && k <= res.kmax; ++k) {
                auto it = res.counts.find(k);
                const Rat have = it == res.counts.end() ? Rat(0) : Rat(it->second);
                ok = have == ref.at(k) * Rat(BigInt(total));
            }
        }
        res.exact = ok;
    } catch (const ResourceError&) {
        res.exact = false;
    }
    return res;
}

std::string OracleResult::to_json() const {
    std::ostringstream os;
    os << "{\"w\":\"" << w.str() << "\",\"t\":\"" << t.get_str()
       << "\",\"lambda\":" << lambda << ",\"exact\":" << (exact ? "true" : "false")
       << ",\"counts\":[";
    bool first = true;
    for (const auto& [k, c] : counts) {
        if (!first) os << ',';
        first = false;
        os << '[' << k << ',' << c << ']';
    }
    os << "]}";
    return os.str();
}

} // namespace blockdelta
