#include "blockdelta/laurent.hpp"

#include <cmath>

namespace blockdelta {

LaurentPoly LaurentPoly::monomial(const Rat& c, int e) {
    LaurentPoly p;
    p.add_term(e, c);
    return p;
}

int LaurentPoly::min_exp() const { return coef_.begin()->first; }
int LaurentPoly::max_exp() const { return coef_.rbegin()->first; }

Rat LaurentPoly::at(int e) const {
    auto it = coef_.find(e);
    return it == coef_.end() ? Rat(0) : it->second;
}

void LaurentPoly::add_term(int e, const Rat& c) {
    if (c == 0) return;
    auto [it, inserted] = coef_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) coef_.erase(it);
    }
}

void LaurentPoly::add_scaled(const LaurentPoly& other, const Rat& c, int shift) {
    if (c == 0) return;
    for (const auto& [e, v] : other.coef_)
        add_term(e + shift, c * v);
}

void LaurentPoly::scale(const Rat& c) {
    if (c == 0) { coef_.clear(); return; }
    for (auto& [e, v] : coef_) v *= c;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
    for (const auto& [e, v] : o.coef_) add_term(e, v);
    return *this;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r;
    for (const auto& [ea, ca] : a.coef_)
        for (const auto& [eb, cb] : b.coef_)
            r.add_term(ea + eb, ca * cb);
    return r;
}

Rat LaurentPoly::value_at_one() const {
    Rat s = 0;
    for (const auto& [e, v] : coef_) s += v;
    return s;
}

Rat LaurentPoly::value_at(const Rat& z) const {
    Rat s = 0;
    for (const auto& [e, v] : coef_) {
        Rat ze = 1;
        int a = e >= 0 ? e : -e;
        for (int i = 0; i < a; ++i) ze *= z;
        if (e < 0) ze = 1 / ze;
        s += v * ze;
    }
    return s;
}

std::complex<double> LaurentPoly::eval_unit(double theta) const {
    std::complex<double> s = 0;
    for (const auto& [e, v] : coef_)
        s += v.get_d() * std::polar(1.0, e * theta);
    return s;
}

std::optional<LaurentPoly> LaurentPoly::divide_once(int sigma) const {
    // Solve (2 - z^sigma) Q = N in coefficients: for sigma=+1,
    // 2 Q_k - Q_{k-1} = N_k, ascending; divisible iff the final carry is 0.
    if (is_zero()) return LaurentPoly();
    LaurentPoly q;
    if (sigma == +1) {
        const int lo = min_exp(), hi = max_exp();
        Rat prev = 0;
        for (int k = lo; k <= hi; ++k) {
            Rat cur = (at(k) + prev) / 2;
            if (k < hi) q.add_term(k, cur);
            else if (cur != 0) return std::nullopt;
            prev = cur;
        }
        return q;
    }
    if (sigma == -1) {
        const int lo = min_exp(), hi = max_exp();
        Rat prev = 0;
        for (int k = hi; k >= lo; --k) {
            Rat cur = (at(k) + prev) / 2;
            if (k > lo) q.add_term(k, cur);
            else if (cur != 0) return std::nullopt;
            prev = cur;
        }
        return q;
    }
    throw std::invalid_argument("divide_once: sigma must be +1 or -1");
}

} // namespace blockdelta
