#include "primelab/reference.hpp"

#include "primelab/errors.hpp"
#include "trial_kernel.hpp"

#include <vector>

namespace primelab::reference {

std::uint64_t count_primes_monolithic(std::uint64_t n) {
    if (n < 2) return 0;
    std::vector<bool> composite(n + 1, false);
    std::uint64_t count = 0;
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        ++count;
        if (i <= n / i)
            for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return count;
}

ConcentrationResult simulate_sum_serial(const PBParams& params, const ThresholdFunction& threshold,
                                        std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw DomainError("simulate_sum needs trials >= 1");
    ConcentrationResult r;
    r.n = params.k();
    r.m = params.m();
    r.threshold = threshold;
    r.window = concentration_window(r.m, threshold);
    r.trials = trials;
    if (params.is_equal()) r.exact_prob = exact_window_probability(params.k(), params.probs().front(), r.window);
    const double half = (r.window.hi - r.window.lo) / 2;
    const auto thresholds = detail::success_thresholds(params.probs());
    detail::TrialTally t;
    for (std::uint64_t i = 0; i < trials; ++i) detail::run_trial(params.probs(), thresholds, r.window, half, seed, i, t);
    detail::finish(r, t);
    return r;
}

} // namespace primelab::reference
