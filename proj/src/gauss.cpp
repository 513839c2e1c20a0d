#include "blockdelta/gauss.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace blockdelta {

namespace {

constexpr double kPi = std::numbers::pi;

// numerator coefficients flattened to doubles, for grid evaluation
struct UnitEvaluator {
    int sigma = 0;
    std::size_t half = 0;
    std::vector<std::vector<std::pair<int, double>>> nums;
    std::vector<int> den_pows;

    UnitEvaluator(const CfEngine& cf, const CFVector& v) {
        sigma = cf.sigma();
        half = v.size();
        nums.resize(half);
        den_pows.resize(half);
        for (std::size_t j = 0; j < half; ++j) {
            den_pows[j] = v[j].den_pow;
            for (const auto& [e, c] : v[j].num.terms())
                nums[j].emplace_back(e, c.get_d());
        }
    }

    std::complex<double> operator()(double theta) const {
        std::complex<double> s = 0;
        for (std::size_t j = 0; j < half; ++j) {
            std::complex<double> v = 0;
            for (const auto& [e, c] : nums[j])
                v += c * std::polar(1.0, e * theta);
            if (den_pows[j] == 1)
                v /= (2.0 - std::polar(1.0, sigma * theta));
            s += v;
        }
        return s / static_cast<double>(half);
    }
};

} // namespace

Constants::Constants(unsigned l) : ell(l) {
    m = pow2_rat(-2 * static_cast<long>(l - 1));
    M = Rat(3 * (l + 2)) * pow2_rat(-(static_cast<long>(l) - 2));
    L = 1.0 / (std::pow(2.0, l + 2) * (l + 3) * kPi * kPi);
    L_split_ = kPi * kPi / (std::pow(2.0, l + 2) * (l + 3));
}

double order3_bound(double a, double b, double theta0) {
    const double aa = std::abs(a), ab = std::abs(b);
    const double x = aa + ab * theta0;
    return aa * ab + 0.5 * b * b * theta0 + (x * x * x / 6.0) * std::exp(aa * theta0 + ab * theta0 * theta0);
}

double Constants::K(double theta0) const { return 4.0 * ell * order3_bound(3, 19, theta0); }

double Constants::C() const {
    return std::max(std::sqrt(1.0 / (2.0 * L_split_)), std::sqrt(1.0 / m.get_d()));
}

double gaussian_main(long long k, double v) {
    if (!(v > 0)) throw std::invalid_argument("gaussian_main: variance must be positive");
    const double kk = static_cast<double>(k);
    return std::exp(-kk * kk / (2.0 * v)) / std::sqrt(2.0 * kPi * v);
}

double gaussian_main(long long k, const Rat& v) {
    if (v <= 0) throw std::invalid_argument("gaussian_main: variance must be positive");
    return gaussian_main(k, v.get_d());
}

GaussReport compare(CfEngine& cf, MomentEngine& mo, const BigInt& t,
                    std::optional<std::pair<long long, long long>> krange) {
    if (t == 0) throw std::invalid_argument("compare: t = 0 has zero variance");
    const Rat v = mo.variance(t);
    if (v <= 0) throw std::invalid_argument("compare: variance is not positive");

    GaussReport rep{cf.pattern(), t, blocks01(t), v.get_d(), {}, 0.0, 0.0};

    IntDist d = cf.pattern().is_constant()
                    ? cf.dist(t, Rat(1, BigInt(1000000000000L))) // tail < 1e-12
                    : cf.dist(t, Rat(1));
    long long klo, khi;
    if (krange) {
        klo = krange->first;
        khi = krange->second;
    } else {
        klo = d.probs.begin()->first;
        khi = d.probs.rbegin()->first;
    }
    for (long long k = klo; k <= khi; ++k) {
        const Rat p = d.at(k);
        GaussRow row;
        row.k = k;
        row.delta_exact = p;
        row.delta = p.get_d();
        row.gaussian = gaussian_main(k, v);
        row.abs_error = std::abs(row.delta - row.gaussian);
        rep.max_error = std::max(rep.max_error, row.abs_error);
        rep.rows.push_back(std::move(row));
    }
    if (rep.N > 0) {
        const Constants cst(cf.pattern().length());
        const double theta0 = cst.C() * std::sqrt(std::log(static_cast<double>(rep.N)) /
                                                  static_cast<double>(rep.N));
        if (rep.N > 1 && theta0 <= kPi)
            rep.bound = error_budget(mo, t).total();
    }
    return rep;
}

PropACheck check_prop_A(MomentEngine& mo, const BigInt& t) {
    const Constants cst(mo.pattern().length());
    const Rat v = mo.variance(t);
    const Rat n01(blocks01(t));
    PropACheck out{true, v - cst.m * n01, cst.M * n01 - v};
    out.ok = out.lower_slack >= 0 && out.upper_slack >= 0;
    return out;
}

double check_prop_B(CfEngine& cf, MomentEngine& mo, const BigInt& t, double theta0, int grid_size) {
    if (theta0 <= 0) throw std::invalid_argument("check_prop_B: theta0 must be positive");
    const Constants cst(cf.pattern().length());
    const double K = cst.K(theta0);
    const double v = mo.variance(t).get_d();
    const double N = static_cast<double>(blocks01(t));
    const UnitEvaluator ev(cf, cf.gamma_pair(t).first);
    double worst = -1e300;
    for (int i = 0; i < grid_size; ++i) {
        const double th = -theta0 + 2.0 * theta0 * i / (grid_size - 1);
        const double lhs = std::abs(ev(th) - std::exp(-v * th * th / 2.0));
        worst = std::max(worst, lhs - K * N * std::abs(th * th * th));
    }
    return worst;
}

PropCResult check_prop_C(CfEngine& cf, const BigInt& t, int grid_size) {
    const unsigned ell = cf.pattern().length();
    const long long N = blocks01(t);
    if (N < static_cast<long long>(ell) + 3) return {false, 0.0};
    const Constants cst(ell);
    const UnitEvaluator ev(cf, cf.gamma_pair(t).first);
    double worst = -1e300;
    for (int i = 0; i < grid_size; ++i) {
        const double th = -kPi + 2.0 * kPi * i / (grid_size - 1);
        worst = std::max(worst, std::abs(ev(th)) - std::exp(-cst.L * N * th * th));
    }
    return {true, worst};
}

ErrorBudget error_budget(MomentEngine& mo, const BigInt& t) {
    const long long N = blocks01(t);
    if (N < 2) throw std::invalid_argument("error_budget: need occ01(t) >= 2");
    const Constants cst(mo.pattern().length());
    const double C = cst.C();
    const double theta0 = C * std::sqrt(std::log(static_cast<double>(N)) / static_cast<double>(N));
    if (theta0 > kPi)
        throw std::invalid_argument("error_budget: theta0 exceeds pi; N too small for the split");
    const double v = mo.variance(t).get_d();
    ErrorBudget b;
    b.N = N;
    b.theta0 = theta0;
    b.gauss_tail = std::exp(-v * theta0 * theta0 / 2.0) / (kPi * theta0 * v);
    b.approx = cst.K(theta0) * static_cast<double>(N) * std::pow(theta0, 4) / (4.0 * kPi);
    b.cf_tail = std::exp(-cst.L * N * theta0 * theta0) / (2.0 * kPi * cst.L * N * theta0);
    return b;
}

CusickDensity cusick_density(CfEngine& cf, const BigInt& t) {
    // For sigma = -1 (w = 1^l) the support is bounded above: sum k >= 0
    // directly. For sigma = +1 (w = 0^l) it is bounded below: complement of
    // the finite negative side. Non-constant patterns have finite support.
    const RationalCF g = [&] {
        RationalCF acc;
        const auto pair = cf.gamma_pair(t);
        const Rat inv(1, static_cast<unsigned long>(cf.dim()));
        for (const auto& e : pair.first) cf.cf_accumulate(acc, e, inv, 0);
        return acc;
    }();

    auto coeff_at = [&](long long k) {
        Rat c = 0;
        for (const auto& [e, ce] : g.num.terms()) {
            if (g.den_pow == 0) {
                if (e == k) c += ce;
            } else {
                const long long m = (k - e) * cf.sigma();
                if (m >= 0) c += ce * pow2_rat(-(m + 1));
            }
        }
        return c;
    };

    Rat s = 0;
    if (g.den_pow == 0 || cf.sigma() < 0) {
        const int hi = g.num.is_zero() ? 0 : g.num.max_exp();
        for (long long k = 0; k <= hi; ++k) s += coeff_at(k);
    } else {
        const int lo = g.num.is_zero() ? 0 : g.num.min_exp();
        Rat neg = 0;
        for (long long k = lo; k < 0; ++k) neg += coeff_at(k);
        s = Rat(1) - neg;
    }
    return {s, s};
}

void GaussReport::write_csv(std::ostream& os) const {
    os << "k,delta_exact,delta_float,gaussian,abs_error\r\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.delta, r.gaussian, r.abs_error);
        os << r.k << ',' << rat_str(r.delta_exact) << ',' << buf << "\r\n";
    }
}

std::string GaussReport::summary_json() const {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "\"N\":%lld,\"variance\":%.17g,\"max_error\":%.17g,\"bound\":%.17g",
                  N, variance, max_error, bound);
    os << "{\"w\":\"" << w.str() << "\",\"t\":\"" << t.get_str() << "\"," << buf
       << ",\"rows\":" << rows.size() << "}";
    return os.str();
}

std::string ErrorBudget::to_json() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "{\"N\":%lld,\"theta0\":%.17g,\"gauss_tail\":%.17g,\"approx\":%.17g,"
                  "\"cf_tail\":%.17g,\"total\":%.17g}",
                  N, theta0, gauss_tail, approx, cf_tail, total());
    return buf;
}

} // namespace blockdelta
