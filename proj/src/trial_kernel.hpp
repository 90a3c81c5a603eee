#pragma once

// One Monte Carlo trial of S = sum f(i), f(i) ~ Bernoulli(p_i). Shared by the
// parallel kernel and the serial reference.

#include "primelab/concentration.hpp"
#include "primelab/philox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace primelab::detail {

struct TrialTally {
    std::uint64_t hits = 0;
    std::uint64_t prefix_hits = 0;
    std::uint64_t sum = 0;
    unsigned __int128 sum_sq = 0;

    TrialTally& operator+=(const TrialTally& o) {
        hits += o.hits;
        prefix_hits += o.prefix_hits;
        sum += o.sum;
        sum_sq += o.sum_sq;
        return *this;
    }
};

// f(i) = 1 iff the next 32-bit draw u satisfies u < p_i 2^32.
inline std::vector<std::uint64_t> success_thresholds(std::span<const double> probs) {
    std::vector<std::uint64_t> t(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        t[i] = static_cast<std::uint64_t>(std::ldexp(probs[i], 32));
    return t;
}

inline void run_trial(std::span<const double> probs, std::span<const std::uint64_t> thresholds,
                      const Window& window, double half_width, std::uint64_t seed, std::uint64_t trial,
                      TrialTally& tally) {
    PhiloxStream rng(seed, trial);
    std::uint64_t s = 0;
    double running = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const bool success = rng.next_u32() < thresholds[i];
        s += success;
        running += (success ? 1.0 : 0.0) - probs[i];
        worst = std::max(worst, std::abs(running));
    }
    tally.hits += window.contains(static_cast<double>(s));
    tally.prefix_hits += worst < half_width;
    tally.sum += s;
    tally.sum_sq += static_cast<unsigned __int128>(s) * s;
}

inline void finish(ConcentrationResult& r, const TrialTally& t) {
    r.hits = t.hits;
    r.prefix_hits = t.prefix_hits;
    const auto n = static_cast<long double>(r.trials);
    r.empirical_prob = static_cast<double>(static_cast<long double>(t.hits) / n);
    const long double mean = static_cast<long double>(t.sum) / n;
    r.sample_mean = static_cast<double>(mean);
    r.sample_variance =
        r.trials > 1 ? static_cast<double>((static_cast<long double>(t.sum_sq) - n * mean * mean) / (n - 1)) : 0.0;
}

} // namespace primelab::detail
