// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavy sweeps parallelize over t with one engine per worker.

#include "blockdelta/cfengine.hpp"
#include "blockdelta/direct.hpp"
#include "blockdelta/gauss.hpp"
#include "blockdelta/moments.hpp"
#include "blockdelta/words.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace blockdelta;

namespace {

int g_jobs = 4;

std::vector<Pattern> patterns_of_length(unsigned ell) {
    std::vector<Pattern> out;
    for (unsigned v = 0; v < (1u << ell); ++v) {
        std::string s;
        for (unsigned i = 0; i < ell; ++i)
            s.push_back(((v >> (ell - 1 - i)) & 1) ? '1' : '0');
        out.emplace_back(s);
    }
    return out;
}

BigInt family_10(unsigned n) {
    BigInt t = 0;
    for (unsigned i = 0; i < n; ++i) t = (t << 2) + 2;
    return t;
}

struct Criterion {
    int id;
    const char* name;
    bool passed;
    double seconds;
    std::string detail;
};

template <typename F>
Criterion run_criterion(int id, const char* name, F&& body) {
    Criterion c{id, name, false, 0.0, ""};
    const auto start = std::chrono::steady_clock::now();
    try {
        c.detail = body();
        c.passed = true;
    } catch (const std::exception& e) {
        c.detail = e.what();
        c.passed = false;
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return c;
}

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// parallel map over patterns: each worker owns its engines
template <typename F>
void for_each_pattern(const std::vector<Pattern>& ws, F&& per_pattern) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::string first_error;
    const int jobs = std::max(1, std::min<int>(g_jobs, static_cast<int>(ws.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= ws.size() || failed.load()) return;
                try {
                    per_pattern(ws[idx]);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!failed.exchange(true)) first_error = e.what();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failed.load()) fail(first_error);
}

// ---------------------------------------------------------------------------

std::string criterion1() {
    // cfengine.dist vs the direct-module exact oracle, exact equality,
    // all patterns with l in {2,3,4}, all t < 256
    std::vector<Pattern> ws;
    for (unsigned ell = 2; ell <= 4; ++ell)
        for (auto& w : patterns_of_length(ell)) ws.push_back(w);
    if (ws.size() != 28) fail("expected 28 patterns");
    std::atomic<long> pairs{0};
    for_each_pattern(ws, [&](const Pattern& w) {
        CfEngine cf(w);
        for (std::uint64_t t = 0; t < 256; ++t) {
            const IntDist ref = exact_dist(w, BigInt(t), 10);
            const IntDist got = w.is_constant() ? cf.dist_k(BigInt(t), 10)
                                                : cf.dist(BigInt(t), Rat(1));
            if (got.probs != ref.probs)
                fail("distribution mismatch at w=" + w.str() + " t=" + std::to_string(t));
            if (got.tail_bound != ref.tail_bound)
                fail("tail mismatch at w=" + w.str() + " t=" + std::to_string(t));
            ++pairs;
        }
    });
    return std::to_string(pairs.load()) + " (w,t) pairs exactly equal";
}

std::string criterion2() {
    long checked = 0;
    for (unsigned ell = 2; ell <= 5; ++ell) {
        auto ws = patterns_of_length(ell);
        for_each_pattern(ws, [&](const Pattern& w) {
            MomentEngine mo(w);
            const Rat bound = Rat(1) - pow2_rat(-(long)(ell - 1));
            for (std::uint64_t t = 0; t < (1u << ell); ++t) {
                const MomentVec a = mo.mean_vec(BigInt(t));
                const MomentVec b = mo.mean_vec_rec(BigInt(t));
                if (a.m != b.m) fail("mean_vec != mean_vec_rec at w=" + w.str());
                if (a.sum() != 0) fail("nonzero mean sum at w=" + w.str());
                if (a.max_abs() > bound) fail("mean norm bound fails at w=" + w.str());
            }
        });
        checked += (1 << ell) * (1 << ell);
    }
    return std::to_string(checked) + " (w,t) residue checks";
}

std::string criterion3() {
    long checked = 0;
    for (unsigned ell = 2; ell <= 6; ++ell) {
        auto ws = patterns_of_length(ell);
        const Rat upper = Rat(3) * pow2_rat(-(long)(ell - 1));
        const Rat generic_lower = pow2_rat(-(long)(ell + 1));
        const Rat case2 = pow2_rat(-(long)(ell - 1)) * (pow2_rat(-(long)(ell - 2)) - 1);
        const Rat case3 = pow2_rat(-(long)(2 * ell - 2));
        for_each_pattern(ws, [&](const Pattern& w) {
            MomentEngine mo(w);
            for (std::uint64_t t = 0; t < (1u << ell); ++t) {
                const Rat q = mo.q_scalar(BigInt(t));
                if (!(q < upper)) fail("q upper bound fails at w=" + w.str());
                switch (mo.q_case(BigInt(t))) {
                    case QCase::i:
                        if (q != 0) fail("case i value at w=" + w.str());
                        break;
                    case QCase::ii:
                        if (q != case2) fail("case ii value at w=" + w.str());
                        break;
                    case QCase::iii:
                        if (q != case3) fail("case iii value at w=" + w.str());
                        break;
                    case QCase::iv:
                        if (q < case3) fail("case iv lower bound at w=" + w.str());
                        break;
                    case QCase::generic:
                        if (q < generic_lower)
                            fail("generic lower bound at w=" + w.str() + " t=" + std::to_string(t));
                        break;
                }
            }
        });
        checked += (1 << ell) * (1 << ell);
    }
    // pinned values
    for (const char* ws : {"01", "10"}) {
        MomentEngine mo{Pattern(ws)};
        if (mo.q_scalar(0) != 0 || mo.q_scalar(2) != 0 ||
            mo.q_scalar(1) != Rat(1, 4) || mo.q_scalar(3) != Rat(1, 4))
            fail("pinned q values for w=01/10");
    }
    return std::to_string(checked) + " residue cases classified and bounded";
}

std::string criterion4() {
    std::atomic<long> checked{0};
    for (unsigned ell = 2; ell <= 5; ++ell) {
        auto ws = patterns_of_length(ell);
        for_each_pattern(ws, [&](const Pattern& w) {
            MomentEngine mo(w);
            const Constants cst(ell);
            for (std::uint64_t t = 0; t < 10000; ++t) {
                const Rat v = mo.variance(BigInt(t));
                const Rat n01(blocks01(BigInt(t)));
                if (!(cst.m * n01 <= v && v <= cst.M * n01))
                    fail("variance sandwich fails at w=" + w.str() + " t=" + std::to_string(t));
                ++checked;
            }
        });
    }
    for (const char* ws : {"01", "10"}) {
        MomentEngine mo{Pattern(ws)};
        for (std::uint64_t t = 0; t < 10000; ++t) {
            if (mo.variance(BigInt(t)) < Rat(blocks01(BigInt(t))) / 4)
                fail("quarter lower bound fails for w=01/10");
            if (mo.variance(BigInt(2 * t)) != mo.variance(BigInt(t)))
                fail("v_{2t} = v_t fails for w=01/10");
        }
    }
    return std::to_string(checked.load()) + " sandwich checks";
}

std::string criterion5() {
    std::atomic<long> checked{0};
    for (unsigned ell = 2; ell <= 5; ++ell) {
        auto ws = patterns_of_length(ell);
        for_each_pattern(ws, [&](const Pattern& w) {
            MomentEngine mo(w);
            const Rat diff_bound = pow2_rat(4 - (long)ell);
            Rat prev = mo.variance(0);
            for (std::uint64_t t = 1; t < 10000; ++t) {
                const Rat cur = mo.variance(BigInt(t));
                if (abs(cur - prev) > diff_bound)
                    fail("|v_{t+1}-v_t| bound fails at w=" + w.str() + " t=" + std::to_string(t));
                prev = cur;
            }
            for (std::uint64_t t = 0; t < 10000; ++t) {
                const VarData vd = mo.var_vec(BigInt(t));
                Rat vmin = vd.v[0], vmax = vd.v[0];
                for (const auto& x : vd.v) {
                    vmin = std::min(vmin, x);
                    vmax = std::max(vmax, x);
                }
                if (vmax - vmin > 16)
                    fail("|v_{t,j}-v_{t,k}| bound fails at w=" + w.str() + " t=" + std::to_string(t));
                ++checked;
            }
        });
    }
    return std::to_string(checked.load()) + " stability checks";
}

std::string criterion6() {
    // eval_cf vs coefficient sums on 1000-point grids, 50 seeded (w,t) draws
    std::mt19937 rng(427);
    for (int i = 0; i < 50; ++i) {
        const unsigned ell = 2 + (rng() % 3);
        auto ws = patterns_of_length(ell);
        const Pattern w = ws[rng() % ws.size()];
        CfEngine cf(w);
        const BigInt t(rng() % 4096);
        const IntDist d = cf.dist(t, Rat(BigInt(1), pow2_int(60)));
        for (int gi = 0; gi < 1000; ++gi) {
            const double theta = -3.14159265358979 + 2 * 3.14159265358979 * gi / 999.0;
            std::complex<double> s = 0;
            for (const auto& [k, p] : d.probs)
                s += p.get_d() * std::polar(1.0, static_cast<double>(k) * theta);
            if (std::abs(cf.eval_cf(t, theta) - s) > 1e-10)
                fail("eval_cf mismatch at w=" + w.str() + " t=" + t.get_str());
        }
    }

    // snake products, exhaustive l <= 4, h <= 6 (at theta = 0)
    for (unsigned ell = 2; ell <= 4; ++ell) {
        const Pattern w = patterns_of_length(ell)[1];
        const std::size_t half = std::size_t(1) << (ell - 1);
        auto B = dense_B(w, 0), C = dense_C(w, 0);
        auto value = [&](const std::vector<std::vector<LaurentPoly>>& M, std::size_t r,
                         std::size_t c) { return M[r][c].value_at_one(); };
        for (int h = 1; h <= 6; ++h)
            for (unsigned eps = 0; eps < (1u << h); ++eps) {
                std::vector<std::vector<Rat>> P(half, std::vector<Rat>(half, Rat(0)));
                for (std::size_t r = 0; r < half; ++r)
                    for (std::size_t c = 0; c < half; ++c)
                        P[r][c] = value((eps & 1) ? C : B, r, c);
                for (int step = 1; step < h; ++step) {
                    const auto& M = ((eps >> step) & 1) ? C : B;
                    std::vector<std::vector<Rat>> Q(half, std::vector<Rat>(half, Rat(0)));
                    for (std::size_t r = 0; r < half; ++r)
                        for (std::size_t k = 0; k < half; ++k)
                            if (P[r][k] != 0)
                                for (std::size_t c = 0; c < half; ++c)
                                    Q[r][c] += P[r][k] * value(M, k, c);
                    P = std::move(Q);
                }
                std::uint64_t val = 0;
                for (int b = h - 1; b >= 0; --b) val = (val << 1) | ((eps >> b) & 1);
                for (std::size_t r = 0; r < half; ++r)
                    for (std::size_t c = 0; c < half; ++c) {
                        const bool hit = r == ((static_cast<std::uint64_t>(c) << h) + val) % half;
                        if (P[r][c] != (hit ? pow2_rat(-h) : Rat(0)))
                            fail("snake product structure fails at l=" + std::to_string(ell));
                    }
            }
    }

    // Gamma_{2^k t} entries all equal for k >= 2l-2
    for (unsigned ell = 2; ell <= 4; ++ell)
        for (auto& w : patterns_of_length(ell)) {
            CfEngine cf(w);
            const unsigned k = 2 * ell - 2;
            for (std::uint64_t t : {1ull, 5ull, 11ull}) {
                const auto g = cf.gamma_pair(BigInt(t) << k).first;
                for (std::size_t j = 1; j < g.size(); ++j)
                    if (!(g[j].num == g[0].num && g[j].den_pow == g[0].den_pow))
                        fail("component equality fails at w=" + w.str());
            }
        }
    return "grids, snake products and component equality all exact";
}

std::string criterion7() {
    std::atomic<long> checkedB{0}, checkedC{0}, skippedC{0};
    for (unsigned ell = 2; ell <= 3; ++ell) {
        auto ws = patterns_of_length(ell);
        for_each_pattern(ws, [&](const Pattern& w) {
            CfEngine cf(w);
            MomentEngine mo(w);
            for (std::uint64_t t = 0; t < 512; ++t) {
                if (check_prop_B(cf, mo, BigInt(t), 1.0, 2001) > 1e-9)
                    fail("Prop B violation at w=" + w.str() + " t=" + std::to_string(t));
                ++checkedB;
                const auto rc = check_prop_C(cf, BigInt(t), 2001);
                if (!rc.applicable) {
                    ++skippedC;
                } else {
                    if (rc.max_violation > 1e-9)
                        fail("Prop C violation at w=" + w.str() + " t=" + std::to_string(t));
                    ++checkedC;
                }
            }
        });
    }
    return std::to_string(checkedB.load()) + " B-checks, " + std::to_string(checkedC.load()) +
           " C-checks (" + std::to_string(skippedC.load()) + " below the block threshold)";
}

std::string criterion8() {
    std::string detail;
    for (const char* ws : {"11", "011"}) {
        Pattern w(ws);
        CfEngine cf(w);
        MomentEngine mo(w);
        double prev_ratio = -1, e8 = 0, e64 = 0;
        for (unsigned n : {8u, 16u, 32u, 64u}) {
            const BigInt t = family_10(n);
            const GaussReport rep = compare(cf, mo, t);
            const double ratio = rep.max_error * n / std::pow(std::log(n), 2);
            if (prev_ratio >= 0 && ratio > 1.5 * prev_ratio)
                fail("scaling ratio grows by more than 1.5x at w=" + w.str() +
                     " N=" + std::to_string(n));
            prev_ratio = ratio;
            if (n == 8) e8 = rep.max_error;
            if (n == 64) e64 = rep.max_error;
        }
        if (!(e64 < e8)) fail("E_64 < E_8 fails at w=" + w.str());
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s: E_8=%.3e E_64=%.3e; ", ws, e8, e64);
        detail += buf;
    }
    return detail;
}

std::string criterion9() {
    std::vector<Pattern> ws;
    for (unsigned ell = 2; ell <= 4; ++ell)
        for (auto& w : patterns_of_length(ell)) ws.push_back(w);
    std::atomic<long> pairs{0};
    for_each_pattern(ws, [&](const Pattern& w) {
        CfEngine cf(w), cfb(w.negated());
        for (std::uint64_t t = 0; t < 256; ++t) {
            const IntDist a = w.is_constant() ? cf.dist_k(BigInt(t), 10)
                                              : cf.dist(BigInt(t), Rat(1));
            const IntDist b = w.is_constant() ? cfb.dist_k(BigInt(t), 10)
                                              : cfb.dist(BigInt(t), Rat(1));
            if (a.tail_bound != b.tail_bound)
                fail("tail symmetry fails at w=" + w.str() + " t=" + std::to_string(t));
            for (const auto& [k, p] : a.probs)
                if (b.at(-k) != p)
                    fail("symmetry fails at w=" + w.str() + " t=" + std::to_string(t));
            ++pairs;
        }
    });
    return std::to_string(pairs.load()) + " mirrored distributions";
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--jobs" && i + 1 < argc) g_jobs = std::max(1, std::atoi(argv[++i]));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    if (hw > 0) g_jobs = std::min<int>(g_jobs, static_cast<int>(hw));

    std::vector<Criterion> results;
    results.push_back(run_criterion(1, "oracle equivalence (28 patterns, t < 256)", criterion1));
    results.push_back(run_criterion(2, "moment identities (l <= 5, all residues)", criterion2));
    results.push_back(run_criterion(3, "q_t values and bounds (l <= 6, exhaustive residues)", criterion3));
    results.push_back(run_criterion(4, "variance sandwich (l <= 5, t < 10^4)", criterion4));
    results.push_back(run_criterion(5, "variance stability bounds (l <= 5, t < 10^4)", criterion5));
    results.push_back(run_criterion(6, "CF identities (grids, snake products, component equality)", criterion6));
    results.push_back(run_criterion(7, "analytic bounds B and C on grids (l <= 3, t < 512)", criterion7));
    results.push_back(run_criterion(8, "Gaussian scaling along t_N = [(10)^N]_2", criterion8));
    results.push_back(run_criterion(9, "negation symmetry (l <= 4, t < 256)", criterion9));

    int failures = 0;
    for (const auto& c : results) {
        std::printf("[%s] criterion %d: %s (%.1fs) %s\n", c.passed ? "PASS" : "FAIL", c.id,
                    c.name, c.seconds, c.detail.c_str());
        failures += c.passed ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures == 0 ? 0 : 1;
}
