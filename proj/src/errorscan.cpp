#include "primelab/errorscan.hpp"

#include "primelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include <omp.h>

namespace primelab {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

ScanRecord make_scan_record(const PiCheckpoint& cp, const LiValue& li, const ThresholdFunction& threshold) {
    ScanRecord r;
    r.n = cp.n;
    r.pi_n = cp.pi_n;
    r.li_n = li.value;
    r.li_error = li.abs_error_bound;
    r.delta = static_cast<double>(cp.pi_n) - li.value;
    r.sqrt_li = std::sqrt(li.value);
    r.ratio = r.sqrt_li > 0.0 ? std::abs(r.delta) / r.sqrt_li : 0.0;
    r.q_value = threshold(static_cast<double>(cp.n));
    r.bound_ok = r.ratio < r.q_value;
    r.sign = sign_of(r.delta);
    const double pi_d = static_cast<double>(cp.pi_n);
    r.window_m_li = 2.0 * threshold(li.value) * std::sqrt(li.value);
    r.window_ok_li = std::abs(r.delta) < r.window_m_li;
    r.window_m_pi = 2.0 * threshold(pi_d) * std::sqrt(pi_d);
    r.window_ok_pi = std::abs(r.delta) < r.window_m_pi;
    return r;
}

std::vector<ScanRecord> scan(const SegmentedSieve& sieve, std::uint64_t limit, const ThresholdFunction& threshold,
                             const ScanOptions& opts, CheckpointCache* cache) {
    if (limit < 100) throw DomainError("scan needs limit >= 100");
    auto grid = geometric_grid(std::min(std::max<std::uint64_t>(opts.first, 2), limit), limit, opts.spacing);
    if (opts.decade_anchors)
        for (std::uint64_t d = 1000; d <= limit; d *= 10) grid.push_back(d);
    for (auto a : opts.anchors) {
        if (a < 2 || a > limit) throw DomainError("anchor " + std::to_string(a) + " outside [2, limit]");
        grid.push_back(a);
    }
    const auto cps = cache ? cache->resolve(sieve, grid) : sieve.count_at(grid);

    std::vector<ScanRecord> records(cps.size());
    std::exception_ptr failure;
    const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cps.size()); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            records[idx] = make_scan_record(cps[idx], li(static_cast<double>(cps[idx].n)), threshold);
        } catch (...) {
#pragma omp critical(primelab_scan_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return records;
}

IntervalRecord interval_compare(const SegmentedSieve& sieve, std::uint64_t n0, std::uint64_t n1) {
    if (n0 < 2 || n1 <= n0) throw DomainError("interval_compare needs 2 <= n0 < n1");
    const std::uint64_t ns[] = {n0, n1};
    const auto cps = sieve.count_at(ns);
    IntervalRecord r;
    r.n0 = n0;
    r.n1 = n1;
    r.pi_diff = cps[1].pi_n - cps[0].pi_n;
    r.li_diff = li_interval(static_cast<double>(n0), static_cast<double>(n1));
    r.excess = static_cast<double>(r.pi_diff) - r.li_diff;
    return r;
}

std::vector<Crossing> detect_sign_changes(std::span<const DeltaSample> samples) {
    std::vector<Crossing> out;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (sign_of(samples[i].delta) != sign_of(samples[i - 1].delta))
            out.push_back({samples[i].n, samples[i - 1].delta, samples[i].delta});
    }
    return out;
}

std::vector<Crossing> sign_change_search(const SegmentedSieve& sieve, std::uint64_t limit) {
    std::vector<Crossing> out;
    if (limit < 3) return out;
    auto delta_at = [](std::uint64_t n, std::uint64_t pi_n, double* err = nullptr) {
        const LiValue v = li(static_cast<double>(n));
        if (err) *err = v.abs_error_bound;
        return static_cast<double>(pi_n) - v.value;
    };

    // Dense phase: every integer.
    constexpr std::uint64_t dense = 1000;
    const std::uint64_t dense_top = std::min(limit, dense);
    const SieveSegment seg = sieve.sieve_range(2, dense_top + 1);
    std::uint64_t pi_n = 1;
    double prev = delta_at(2, 1);
    for (std::uint64_t n = 3; n <= dense_top; ++n) {
        pi_n += seg.is_prime(n);
        const double d = delta_at(n, pi_n);
        if (sign_of(d) != sign_of(prev)) out.push_back({n, prev, d});
        prev = d;
    }
    if (limit <= dense) return out;

    // Sparse phase. Invariant: prev is delta at last_n, and the sign of every
    // integer up to last_n is accounted for.
    std::uint64_t last_n = dense_top;
    std::uint64_t next_eval_pi = 0; // primes with a smaller index are provably negative
    bool walk = sign_of(prev) >= 0;

    auto walk_gap = [&](std::uint64_t until) {
        // Delta decreases strictly between primes; walk until it is negative.
        for (std::uint64_t n = last_n + 1; n <= until; ++n) {
            const double d = delta_at(n, pi_n);
            if (sign_of(d) != sign_of(prev)) out.push_back({n, prev, d});
            prev = d;
            last_n = n;
            if (d < 0.0) break;
        }
        last_n = until;
        walk = false;
    };

    sieve.for_each_prime(dense_top + 1, limit + 1, [&](std::uint64_t p, std::uint64_t j) {
        if (walk) walk_gap(p - 1);
        if (j < next_eval_pi) {
            pi_n = j;
            last_n = p;
            return true;
        }
        double err = 0.0;
        const double d = delta_at(p, j, &err);
        if (sign_of(d) != sign_of(prev)) {
            const double before = delta_at(p - 1, j - 1);
            out.push_back({p, before, d});
        }
        prev = d;
        pi_n = j;
        last_n = p;
        if (d < 0.0) {
            // delta(p_{j+i}) < delta(p_j) + i, so the next i < -delta primes stay negative.
            const double room = -d - std::max(1e-6, 16.0 * err);
            const auto skip = room > 1.0 ? static_cast<std::uint64_t>(std::ceil(room)) : std::uint64_t{1};
            next_eval_pi = j + skip;
        } else {
            walk = true;
        }
        return true;
    });
    if (walk) walk_gap(limit);
    return out;
}

std::vector<ThresholdFunction> default_fit_families() {
    return {ThresholdFunction{ThresholdFamily::log, 1.0, 0.25, false},
            ThresholdFunction{ThresholdFamily::loglog, 1.0, 0.25, false},
            ThresholdFunction{ThresholdFamily::power, 1.0, 0.25, false}};
}

FitSummary threshold_fit(std::span<const ScanRecord> records, std::span<const ThresholdFunction> families,
                         std::uint64_t min_n) {
    if (records.size() < 2) throw EmptyInput("threshold_fit needs at least two scan records");
    FitSummary s;
    s.max_ratio = records.front().ratio;
    s.argmax_n = records.front().n;
    for (const auto& r : records) {
        if (r.ratio > s.max_ratio) {
            s.max_ratio = r.ratio;
            s.argmax_n = r.n;
        }
        if (!r.bound_ok && (!s.last_failure_n || r.n > *s.last_failure_n)) s.last_failure_n = r.n;
    }
    for (const auto& f : families) {
        const ThresholdFunction unit = f.unit();
        FamilyFit fit{unit.family_name(), unit.family == ThresholdFamily::power ? unit.alpha : 0.0, std::nullopt};
        for (const auto& r : records) {
            if (r.n < min_n) continue;
            const double q = unit(static_cast<double>(r.n));
            if (!(q > 0.0)) continue;
            const double c = r.ratio / q;
            if (!fit.c || c > *fit.c) fit.c = c;
        }
        s.fits.push_back(fit);
    }
    return s;
}

} // namespace primelab
