#include "primelab/sieve.hpp"

#include "primelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <omp.h>

namespace primelab {

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

int prime_indicator(std::uint64_t n) {
    if (n < 2) return 0;
    if (n < 4) return 1;
    if (n % 2 == 0 || n % 3 == 0) return 0;
    for (std::uint64_t d = 5; d <= n / d; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return 0;
    }
    return 1;
}

bool SieveSegment::is_prime(std::uint64_t n) const {
    if (n < lo || n >= hi) throw IndexError("n outside sieved window");
    return !composite[n - lo];
}

std::uint64_t SieveSegment::count() const {
    return static_cast<std::uint64_t>(std::count(composite.begin(), composite.end(), false));
}

std::vector<std::uint64_t> SieveSegment::primes() const {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < composite.size(); ++i)
        if (!composite[i]) out.push_back(lo + i);
    return out;
}

std::vector<std::uint64_t> geometric_grid(std::uint64_t first, std::uint64_t limit, double ratio) {
    if (first < 2 || first > limit) throw DomainError("geometric grid needs 2 <= first <= limit");
    if (!(ratio > 1.0)) throw DomainError("geometric grid ratio must exceed 1");
    std::vector<std::uint64_t> grid;
    for (int k = 0;; ++k) {
        const long double x = static_cast<long double>(first) * std::pow(static_cast<long double>(ratio), k);
        if (x > static_cast<long double>(limit)) break;
        const auto n = static_cast<std::uint64_t>(std::llroundl(x));
        if (n > limit) break;
        if (grid.empty() || grid.back() != n) grid.push_back(n);
    }
    if (grid.back() != limit) grid.push_back(limit);
    return grid;
}

SegmentedSieve::SegmentedSieve(SieveConfig config) : config_(config) {
    if (config_.segment_odds == 0) throw DomainError("segment size must be positive");
    const std::uint64_t bound = isqrt(config_.global_limit);
    std::vector<bool> comp(bound + 1, false);
    for (std::uint64_t i = 2; i <= bound; ++i) {
        if (comp[i]) continue;
        base_.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= bound; j += i) comp[j] = true;
    }
}

void SegmentedSieve::check_limit(std::uint64_t last) const {
    if (last > config_.global_limit)
        throw RangeTooLarge("requested range ends at " + std::to_string(last) + ", above global limit " +
                            std::to_string(config_.global_limit));
}

void SegmentedSieve::sieve_odds(std::uint64_t lo, std::uint64_t hi, std::vector<std::uint8_t>& flags) const {
    const std::uint64_t first_odd = lo | 1;
    if (first_odd >= hi) {
        flags.clear();
        return;
    }
    const std::uint64_t len = (hi - first_odd + 1) / 2;
    flags.assign(len, 0);
    if (first_odd == 1) flags[0] = 1;
    for (std::size_t k = 1; k < base_.size(); ++k) {
        const std::uint64_t p = base_[k];
        if (p * p >= hi) break;
        std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
        if ((start & 1) == 0) start += p;
        for (std::uint64_t j = (start - first_odd) / 2; j < len; j += p) flags[j] = 1;
    }
}

SieveSegment SegmentedSieve::sieve_range(std::uint64_t lo, std::uint64_t hi) const {
    if (lo < 2 || hi <= lo) throw DomainError("sieve_range needs 2 <= lo < hi");
    check_limit(hi - 1);
    if (hi - lo > 2 * static_cast<std::uint64_t>(config_.segment_odds))
        throw RangeTooLarge("window wider than one segment");
    std::vector<std::uint8_t> flags;
    sieve_odds(lo, hi, flags);
    SieveSegment seg{lo, hi, std::vector<bool>(hi - lo, true)};
    const std::uint64_t first_odd = lo | 1;
    for (std::size_t i = 0; i < flags.size(); ++i)
        if (!flags[i]) seg.composite[first_odd + 2 * i - lo] = false;
    if (lo == 2) seg.composite[0] = false;
    return seg;
}

std::vector<PiCheckpoint> SegmentedSieve::count_at(std::span<const std::uint64_t> ns) const {
    std::vector<std::uint64_t> want(ns.begin(), ns.end());
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());
    std::vector<PiCheckpoint> out;
    if (want.empty()) return out;
    check_limit(want.back());

    // Odd numbers 3..N are split into fixed segments; 2 is added afterwards.
    const std::uint64_t top = want.back();
    const std::uint64_t width = 2 * static_cast<std::uint64_t>(config_.segment_odds);
    const std::uint64_t n_seg = top < 3 ? 0 : (top + 1 - 3 + width - 1) / width;

    // Checkpoints falling in segment s occupy [cp_begin[s], cp_begin[s+1]).
    std::vector<std::size_t> cp_begin(n_seg + 1, want.size());
    {
        std::size_t c = 0;
        while (c < want.size() && want[c] < 3) ++c;
        for (std::uint64_t s = 0; s < n_seg; ++s) {
            cp_begin[s] = c;
            const std::uint64_t seg_hi = 3 + (s + 1) * width;
            while (c < want.size() && want[c] < seg_hi) ++c;
        }
    }

    std::vector<std::uint64_t> seg_total(n_seg, 0);
    std::vector<std::uint64_t> local(want.size(), 0);
    const int jobs = config_.jobs;

#pragma omp parallel num_threads(jobs > 0 ? jobs : omp_get_max_threads()) if (n_seg > 1)
    {
        std::vector<std::uint8_t> flags;
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t si = 0; si < static_cast<std::int64_t>(n_seg); ++si) {
            const auto s = static_cast<std::uint64_t>(si);
            const std::uint64_t lo = 3 + s * width;
            const std::uint64_t hi = std::min(lo + width, top + 1);
            sieve_odds(lo, hi, flags);
            std::uint64_t running = 0;
            std::size_t i = 0;
            for (std::size_t c = cp_begin[s]; c < cp_begin[s + 1]; ++c) {
                // odd values <= want[c] have index < (want[c] - lo) / 2 + 1
                const std::size_t end = static_cast<std::size_t>((want[c] - lo) / 2 + 1);
                for (; i < end; ++i) running += flags[i] == 0;
                local[c] = running;
            }
            for (; i < flags.size(); ++i) running += flags[i] == 0;
            seg_total[s] = running;
        }
    }

    out.reserve(want.size());
    std::uint64_t before = 0;
    std::size_t c = 0;
    for (; c < want.size() && want[c] < 3; ++c) out.push_back({want[c], want[c] == 2 ? 1u : 0u});
    for (std::uint64_t s = 0; s < n_seg; ++s) {
        for (std::size_t k = cp_begin[s]; k < cp_begin[s + 1]; ++k) out.push_back({want[k], 1 + before + local[k]});
        before += seg_total[s];
    }
    return out;
}

std::uint64_t SegmentedSieve::pi(std::uint64_t n) const {
    const std::uint64_t one[] = {n};
    return count_at(one).front().pi_n;
}

std::vector<PiCheckpoint> SegmentedSieve::pi_checkpoints(std::uint64_t limit, double spacing,
                                                         std::span<const std::uint64_t> anchors) const {
    if (limit < 2) throw DomainError("pi_checkpoints needs limit >= 2");
    auto grid = geometric_grid(std::min<std::uint64_t>(100, limit), limit, spacing);
    for (auto a : anchors) {
        if (a < 2 || a > limit) throw DomainError("anchor " + std::to_string(a) + " outside [2, limit]");
        grid.push_back(a);
    }
    return count_at(grid);
}

VerificationCost SegmentedSieve::verification_cost(std::uint64_t n) const {
    if (n < 2) throw DomainError("verification cost needs n >= 2");
    check_limit(n);
    std::uint64_t trials = 0;
    for (const std::uint32_t p : base_) {
        if (static_cast<std::uint64_t>(p) * p > n) break;
        ++trials;
        if (n % p == 0) return {n, trials, Verdict::composite};
    }
    // n = 2, 3 have no candidate divisor; one vacuous check is recorded.
    return {n, std::max<std::uint64_t>(trials, 1), Verdict::prime};
}

const SegmentedSieve& default_sieve() {
    static const SegmentedSieve sieve;
    return sieve;
}

} // namespace primelab
