#pragma once

// Gaussian comparison and verification of the explicit analytic bounds:
// variance sandwich (A), CF approximation near 0 (B), CF tail decay (C),
// the assembled integral error budget, and the one-sided density functional.

#include "blockdelta/cfengine.hpp"
#include "blockdelta/moments.hpp"
#include "blockdelta/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace blockdelta {

// Explicit constants as functions of l = |w|. L = 1/(2^{l+2}(l+3) pi^2) is
// the decay rate the tail-bound argument actually yields and is what every
// bound here uses. The split point theta0 = C sqrt(log N / N) is tuned with
// the coarser rate pi^2/(2^{l+2}(l+3)) so that theta0 <= pi already at
// desk-scale N; any theta0 in (0, pi] gives valid budget terms. Grid checks
// are evidence, not proofs.
struct Constants {
    explicit Constants(unsigned ell);
    unsigned ell;
    Rat m;    // 1/4^{l-1}
    Rat M;    // 3(l+2)/2^{l-2}
    double L; // CF tail decay rate
    double K(double theta0) const; // 4l * K3(3, 19, theta0)
    double C() const;              // split tuning: max(sqrt(1/(2 L_split)), sqrt(1/m))

private:
    double L_split_;
};

// |exp(ia theta + b theta^2)_{>=3}| <= order3_bound(a,b,theta0) |theta|^3
double order3_bound(double a, double b, double theta0);

// (2 pi v)^{-1/2} exp(-k^2/(2v)); v must be positive
double gaussian_main(long long k, double v);
double gaussian_main(long long k, const Rat& v);

struct GaussRow {
    long long k;
    Rat delta_exact;
    double delta;
    double gaussian;
    double abs_error;
};

struct GaussReport {
    Pattern w;
    BigInt t;
    long long N = 0;         // occ01(t)
    double variance = 0;
    std::vector<GaussRow> rows;
    double max_error = 0;
    double bound = 0;        // assembled error-budget total

    void write_csv(std::ostream& os) const; // k,delta_exact,delta_float,gaussian,abs_error
    std::string summary_json() const;
};

// tabulate delta_t(k) against the Gaussian main term; default krange is the
// full support (non-constant w) or the smallest window with tail < 1e-12
GaussReport compare(CfEngine& cf, MomentEngine& mo, const BigInt& t,
                    std::optional<std::pair<long long, long long>> krange = std::nullopt);

struct PropACheck {
    bool ok;
    Rat lower_slack; // v_t - m N
    Rat upper_slack; // M N - v_t
};
PropACheck check_prop_A(MomentEngine& mo, const BigInt& t);

// max over the grid of |gamma_t - exp(-v_t theta^2/2)| - K(theta0) N |theta|^3
double check_prop_B(CfEngine& cf, MomentEngine& mo, const BigInt& t, double theta0, int grid_size);

struct PropCResult {
    bool applicable; // occ01(t) >= l+3
    double max_violation = 0;
};
PropCResult check_prop_C(CfEngine& cf, const BigInt& t, int grid_size);

struct ErrorBudget {
    long long N = 0;
    double theta0 = 0;
    double gauss_tail = 0; // (1/(pi theta0 v_t)) exp(-v_t theta0^2 / 2)
    double approx = 0;     // K(theta0) N theta0^4 / (4 pi)
    double cf_tail = 0;    // (1/(2 pi L N theta0)) exp(-L N theta0^2)
    double total() const { return gauss_tail + approx + cf_tail; }
    std::string to_json() const;
};
// requires theta0 = C sqrt(log N / N) <= pi
ErrorBudget error_budget(MomentEngine& mo, const BigInt& t);

struct CusickDensity {
    Rat lo, hi; // equal when the one-sided sum is computed exactly
};
// sum_{k>=0} delta_t(k), exact via the finite side of the support
CusickDensity cusick_density(CfEngine& cf, const BigInt& t);

} // namespace blockdelta
