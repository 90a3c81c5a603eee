#pragma once

// Concentration of Bernoulli sums S = f(1) + ... + f(n) inside the open window
// (m - M(m) sqrt(m), m + M(m) sqrt(m)), m = sum p_i: Monte Carlo estimates,
// exact binomial values for the equal-probability case and the Gaussian limit.

#include "primelab/pbin.hpp"
#include "primelab/threshold.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace primelab {

struct Window {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double s) const noexcept { return s > lo && s < hi; }
};

// Window centred at m with half-width M(m) sqrt(m).
Window concentration_window(double m, const ThresholdFunction& threshold);

struct ConcentrationResult {
    std::size_t n = 0;
    double m = 0.0;
    ThresholdFunction threshold;
    Window window;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    double empirical_prob = 0.0;
    std::optional<double> exact_prob; // equal-probability vectors only
    double sample_mean = 0.0;
    double sample_variance = 0.0;
    // Trials whose running deviation max_j |sum_{i<=j} (f(i) - p_i)| stayed
    // below the half-width. Recorded, never asserted.
    std::uint64_t prefix_hits = 0;
};

// Trials are keyed individually in the counter-based generator, so the result
// depends only on (params, threshold, trials, seed), not on `jobs`.
ConcentrationResult simulate_sum(const PBParams& params, const ThresholdFunction& threshold,
                                 std::uint64_t trials, std::uint64_t seed, int jobs = 0);

inline constexpr std::size_t kExactWindowMaxN = 10'000'000;

// Exact P(S in window) for S ~ Binomial(n, p). SizeError above kExactWindowMaxN.
double exact_window_probability(std::size_t n, double p, const Window& window);
double exact_window_probability(std::size_t n, double p, const ThresholdFunction& threshold);

// Phi(b) - Phi(a); infinite limits allowed.
double normal_probability(double a, double b);

// Gaussian limit: P(|Z| < M(m) / sqrt(1 - p)). DomainError unless 0 < p < 1
// and n p (1 - p) >= 10.
double gaussian_window_approx(std::size_t n, double p, const ThresholdFunction& threshold);

// Produces the index-th probability vector of a sweep.
using VectorSampler = std::function<std::vector<double>(std::size_t index)>;

VectorSampler equal_sampler(std::size_t n, double m);
// Uniform weights rescaled to sum m, clipped at 1 with the excess redistributed.
VectorSampler random_sampler(std::size_t n, double m, std::uint64_t seed);
// A fraction of the entries pinned to 0 or 1, the rest drawn as random_sampler.
VectorSampler mixed_sampler(std::size_t n, double m, double degenerate_fraction, std::uint64_t seed);

struct SweepRow {
    std::size_t index = 0;
    ConcentrationResult result;
    double reference_exact = 0.0; // equal-probability exact value at the same (n, m)
    bool flagged = false;         // empirical below reference by > 3 standard errors
};

std::vector<SweepRow> theorem3_sweep(std::size_t n, double m, const VectorSampler& sampler, std::size_t count,
                                     const ThresholdFunction& threshold, std::uint64_t trials,
                                     std::uint64_t seed, int jobs = 0);

} // namespace primelab
