#include "primelab/concentration.hpp"

#include "primelab/errors.hpp"
#include "primelab/philox.hpp"
#include "trial_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <omp.h>

namespace primelab {
namespace {

constexpr std::uint64_t kTrialBlock = 256;

ConcentrationResult prepare(const PBParams& params, const ThresholdFunction& threshold, std::uint64_t trials) {
    if (trials < 1) throw DomainError("simulate_sum needs trials >= 1");
    ConcentrationResult r;
    r.n = params.k();
    r.m = params.m();
    r.threshold = threshold;
    r.window = concentration_window(r.m, threshold);
    r.trials = trials;
    if (params.is_equal()) r.exact_prob = exact_window_probability(params.k(), params.probs().front(), r.window);
    return r;
}

double log_binomial_pmf(std::size_t n, double p, std::size_t q) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(q) + 1.0) -
           std::lgamma(static_cast<double>(n - q) + 1.0) + static_cast<double>(q) * std::log(p) +
           static_cast<double>(n - q) * std::log1p(-p);
}

// Rescales w to sum m and clips entries at 1, redistributing the excess.
std::vector<double> water_fill(std::vector<double> w, double m) {
    std::vector<bool> pinned(w.size(), false);
    double target = m;
    for (;;) {
        double free_sum = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (!pinned[i]) free_sum += w[i];
        if (free_sum <= 0.0) break;
        const double scale = target / free_sum;
        bool clipped = false;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (pinned[i]) continue;
            w[i] *= scale;
            if (w[i] >= 1.0) {
                w[i] = 1.0;
                pinned[i] = true;
                target -= 1.0;
                clipped = true;
            }
        }
        if (!clipped) break;
    }
    for (double& v : w) v = std::clamp(v, 0.0, 1.0);
    return w;
}

std::vector<double> random_weights(std::size_t n, std::uint64_t seed, std::size_t index) {
    PhiloxStream rng(mix_seed(seed, index), 0);
    std::vector<double> w(n);
    for (double& v : w) v = rng.uniform() + 1e-9;
    return w;
}

void check_mean(std::size_t n, double m) {
    if (n == 0) throw DomainError("sampler needs n >= 1");
    if (!(m >= 0.0 && m <= static_cast<double>(n))) throw DomainError("sampler mean outside [0, n]");
}

} // namespace

Window concentration_window(double m, const ThresholdFunction& threshold) {
    const double half = threshold(m) * std::sqrt(std::max(m, 0.0));
    return {m - half, m + half};
}

ConcentrationResult simulate_sum(const PBParams& params, const ThresholdFunction& threshold,
                                 std::uint64_t trials, std::uint64_t seed, int jobs) {
    ConcentrationResult r = prepare(params, threshold, trials);
    const double half = (r.window.hi - r.window.lo) / 2;
    const auto probs = params.probs();
    const auto thresholds = detail::success_thresholds(probs);
    const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<detail::TrialTally> partial(blocks);
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();

#pragma omp parallel for num_threads(threads) schedule(dynamic, 4)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
        const std::uint64_t first = static_cast<std::uint64_t>(b) * kTrialBlock;
        const std::uint64_t last = std::min(first + kTrialBlock, trials);
        detail::TrialTally t;
        for (std::uint64_t i = first; i < last; ++i) detail::run_trial(probs, thresholds, r.window, half, seed, i, t);
        partial[static_cast<std::size_t>(b)] = t;
    }

    detail::TrialTally total;
    for (const auto& t : partial) total += t;
    detail::finish(r, total);
    return r;
}

double exact_window_probability(std::size_t n, double p, const Window& window) {
    if (n > kExactWindowMaxN) throw SizeError("exact window probability is limited to n <= 10^7");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p outside [0, 1]");
    const double nd = static_cast<double>(n);
    // Integers strictly inside (lo, hi).
    const double first_d = std::max(0.0, std::floor(window.lo) + 1.0);
    const double last_d = std::min(nd, std::ceil(window.hi) - 1.0);
    if (last_d < first_d) return 0.0;
    if (p == 0.0 || p == 1.0) {
        const double s = p == 0.0 ? 0.0 : nd;
        return (s >= first_d && s <= last_d) ? 1.0 : 0.0;
    }
    // Terms further than 40 sigma from the mean are below e^-800.
    const double sd = std::sqrt(nd * p * (1.0 - p));
    const double lo_d = std::max(first_d, std::floor(nd * p - 40.0 * sd - 1.0));
    const double hi_d = std::min(last_d, std::ceil(nd * p + 40.0 * sd + 1.0));
    double sum = 0.0, comp = 0.0;
    for (auto q = static_cast<std::size_t>(lo_d); q <= static_cast<std::size_t>(hi_d); ++q) {
        const double term = std::exp(log_binomial_pmf(n, p, q));
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return std::min(1.0, sum + comp);
}

double exact_window_probability(std::size_t n, double p, const ThresholdFunction& threshold) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p outside [0, 1]");
    return exact_window_probability(n, p, concentration_window(static_cast<double>(n) * p, threshold));
}

double normal_probability(double a, double b) {
    if (!(b > a)) return 0.0;
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    // Use the tail on the side that avoids cancellation.
    if (a >= 0.0) return 0.5 * (std::erfc(a * inv_sqrt2) - std::erfc(b * inv_sqrt2));
    if (b <= 0.0) return 0.5 * (std::erfc(-b * inv_sqrt2) - std::erfc(-a * inv_sqrt2));
    return 1.0 - 0.5 * (std::erfc(-a * inv_sqrt2) + std::erfc(b * inv_sqrt2));
}

double gaussian_window_approx(std::size_t n, double p, const ThresholdFunction& threshold) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("gaussian window needs 0 < p < 1");
    const double nd = static_cast<double>(n);
    if (nd * p * (1.0 - p) < 10.0) throw DomainError("gaussian window needs n p (1 - p) >= 10");
    const double b = threshold(nd * p) / std::sqrt(1.0 - p);
    return normal_probability(-b, b);
}

VectorSampler equal_sampler(std::size_t n, double m) {
    check_mean(n, m);
    return [n, m](std::size_t) { return std::vector<double>(n, m / static_cast<double>(n)); };
}

VectorSampler random_sampler(std::size_t n, double m, std::uint64_t seed) {
    check_mean(n, m);
    return [n, m, seed](std::size_t index) { return water_fill(random_weights(n, seed, index), m); };
}

VectorSampler mixed_sampler(std::size_t n, double m, double degenerate_fraction, std::uint64_t seed) {
    check_mean(n, m);
    if (!(degenerate_fraction >= 0.0 && degenerate_fraction <= 1.0))
        throw DomainError("degenerate fraction outside [0, 1]");
    const auto d = static_cast<std::size_t>(std::floor(degenerate_fraction * static_cast<double>(n)));
    const std::size_t rest = n - d;
    // Ones among the pinned entries, chosen so the free entries can carry the rest.
    auto ones = static_cast<std::size_t>(std::llround(static_cast<double>(d) * m / static_cast<double>(n)));
    ones = std::min<std::size_t>(ones, static_cast<std::size_t>(std::floor(m)));
    const double need = m - static_cast<double>(rest);
    if (need > static_cast<double>(ones)) ones = static_cast<std::size_t>(std::ceil(need));
    ones = std::min(ones, d);
    return [n, m, d, rest, ones, seed](std::size_t index) {
        std::vector<double> v(n, 0.0);
        std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(ones), 1.0);
        if (rest > 0) {
            const auto free = water_fill(random_weights(rest, seed, index), m - static_cast<double>(ones));
            std::copy(free.begin(), free.end(), v.begin() + static_cast<std::ptrdiff_t>(d));
        }
        return v;
    };
}

std::vector<SweepRow> theorem3_sweep(std::size_t n, double m, const VectorSampler& sampler, std::size_t count,
                                     const ThresholdFunction& threshold, std::uint64_t trials,
                                     std::uint64_t seed, int jobs) {
    check_mean(n, m);
    const double reference = exact_window_probability(n, m / static_cast<double>(n), threshold);
    const double se = std::sqrt(reference * (1.0 - reference) / static_cast<double>(trials));
    std::vector<SweepRow> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto probs = sampler(i);
        if (probs.size() != n) throw DomainError("sampler returned a vector of the wrong length");
        const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
        if (std::abs(total - m) > 1e-9) throw DomainError("sampler vector sum " + std::to_string(total) + " != m");
        SweepRow row;
        row.index = i;
        row.result = simulate_sum(PBParams(std::move(probs)), threshold, trials, mix_seed(seed, i), jobs);
        row.reference_exact = reference;
        row.flagged = row.result.empirical_prob < reference - 3.0 * se;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace primelab
