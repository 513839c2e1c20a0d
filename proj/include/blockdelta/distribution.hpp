#pragma once

// Exact finite-support rational distribution on Z, plus a certified tail
// mass for the constant patterns 0^l / 1^l (whose support is one-sidedly
// infinite with geometric decay).

#include "blockdelta/rational.hpp"
#include "blockdelta/words.hpp"

#include <map>
#include <string>

namespace blockdelta {

struct IntDist {
    Pattern w;
    BigInt t;
    std::map<long long, Rat> probs; // exact point masses, nonzero entries only
    Rat tail_bound = 0;             // exact mass outside the listed support

    Rat at(long long k) const {
        auto it = probs.find(k);
        return it == probs.end() ? Rat(0) : it->second;
    }
    Rat listed_mass() const {
        Rat s = 0;
        for (const auto& [k, p] : probs) s += p;
        return s;
    }
    Rat mean_listed() const {
        Rat s = 0;
        for (const auto& [k, p] : probs) s += rat_of(k) * p;
        return s;
    }
    Rat second_moment_listed() const {
        Rat s = 0;
        for (const auto& [k, p] : probs) s += rat_of(k) * rat_of(k) * p;
        return s;
    }

    // {"w","t","support":[[k,"p/q"],...],"tail_bound":"p/q"} with k ascending
    std::string to_json() const;
};

} // namespace blockdelta
