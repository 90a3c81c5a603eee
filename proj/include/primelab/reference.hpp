#pragma once

// Serial reference kernels. Kept deliberately plain so the parallel kernels
// can be checked against them and benchmarked side by side.

#include "primelab/concentration.hpp"
#include "primelab/pbin.hpp"

#include <cstdint>

namespace primelab::reference {

// Monolithic sieve over [0, n] held in memory at once (no segments, no wheel).
std::uint64_t count_primes_monolithic(std::uint64_t n);

// Same trial loop as simulate_sum, run one trial after another on one thread.
ConcentrationResult simulate_sum_serial(const PBParams& params, const ThresholdFunction& threshold,
                                        std::uint64_t trials, std::uint64_t seed);

} // namespace primelab::reference
