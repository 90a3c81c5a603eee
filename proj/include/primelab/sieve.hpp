#pragma once

// Segmented, odds-only sieve of Eratosthenes with exact prime counting at
// arbitrary checkpoints. Segments are sieved independently (OpenMP) and the
// per-segment counts are merged serially, so results never depend on the
// number of worker threads.

#include <cstdint>
#include <span>
#include <vector>

namespace primelab {

inline constexpr std::uint64_t kDefaultGlobalLimit = 10'000'000'000ULL;
inline constexpr std::size_t kDefaultSegmentOdds = std::size_t{1} << 20;

struct SieveConfig {
    std::uint64_t global_limit = kDefaultGlobalLimit; // largest integer that may be sieved
    std::size_t segment_odds = kDefaultSegmentOdds;   // odd entries per segment
    int jobs = 0;                                     // 0 = OpenMP default
};

struct PiCheckpoint {
    std::uint64_t n = 0;
    std::uint64_t pi_n = 0;

    friend bool operator==(const PiCheckpoint&, const PiCheckpoint&) = default;
};

enum class Verdict { prime, composite };

// Trial divisions by successive primes needed to settle primality of n.
struct VerificationCost {
    std::uint64_t n = 0;
    std::uint64_t trials = 0;
    Verdict verdict = Verdict::composite;
};

// Result of sieving the half-open window [lo, hi).
struct SieveSegment {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::vector<bool> composite; // composite[i] clear iff lo + i is prime

    bool is_prime(std::uint64_t n) const;
    std::uint64_t count() const;
    std::vector<std::uint64_t> primes() const;
};

// 1 iff n is prime; 0 and 1 map to 0.
int prime_indicator(std::uint64_t n);

// Integer square root, floor(sqrt(n)).
std::uint64_t isqrt(std::uint64_t n);

// Geometric checkpoint grid: round(first * ratio^k) for k = 0, 1, ... while <= limit,
// deduplicated, with limit appended. Requires 2 <= first <= limit and ratio > 1.
std::vector<std::uint64_t> geometric_grid(std::uint64_t first, std::uint64_t limit, double ratio);

class SegmentedSieve {
public:
    explicit SegmentedSieve(SieveConfig config = {});

    const SieveConfig& config() const noexcept { return config_; }
    std::span<const std::uint32_t> base_primes() const noexcept { return base_; }

    // Throws RangeTooLarge when hi - 1 exceeds the global limit or the window
    // is wider than one segment (2 * segment_odds integers).
    SieveSegment sieve_range(std::uint64_t lo, std::uint64_t hi) const;

    // Exact pi(n) for every n in `ns` (any order, duplicates allowed); output in
    // ascending n without duplicates.
    std::vector<PiCheckpoint> count_at(std::span<const std::uint64_t> ns) const;

    std::uint64_t pi(std::uint64_t n) const;

    // Checkpoints on geometric_grid(min(100, limit), limit, spacing) plus anchors.
    std::vector<PiCheckpoint> pi_checkpoints(std::uint64_t limit, double spacing,
                                             std::span<const std::uint64_t> anchors = {}) const;

    VerificationCost verification_cost(std::uint64_t n) const;

    // Calls f(p, pi(p)) for every prime p in [lo, hi), in ascending order, one
    // segment in memory at a time. Returning false from f stops the walk.
    template <class F>
    void for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const;

private:
    void check_limit(std::uint64_t last) const;
    // Marks odd composites in [lo, hi) into flags (index i <-> first odd >= lo plus 2i).
    void sieve_odds(std::uint64_t lo, std::uint64_t hi, std::vector<std::uint8_t>& flags) const;

    SieveConfig config_;
    std::vector<std::uint32_t> base_;
};

// Process-wide sieve with default configuration.
const SegmentedSieve& default_sieve();

inline VerificationCost verification_cost(std::uint64_t n) { return default_sieve().verification_cost(n); }

template <class F>
void SegmentedSieve::for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const {
    if (hi <= lo) return;
    if (lo < 2) lo = 2;
    if (hi <= lo) return;
    check_limit(hi - 1);
    std::uint64_t count = lo > 2 ? pi(lo - 1) : 0;
    if (lo == 2) {
        ++count;
        if (!f(std::uint64_t{2}, count)) return;
        lo = 3;
    }
    const std::uint64_t width = 2 * static_cast<std::uint64_t>(config_.segment_odds);
    std::vector<std::uint8_t> flags;
    for (std::uint64_t seg_lo = lo; seg_lo < hi; seg_lo += width) {
        const std::uint64_t seg_hi = seg_lo + width < hi ? seg_lo + width : hi;
        sieve_odds(seg_lo, seg_hi, flags);
        const std::uint64_t first_odd = seg_lo | 1;
        for (std::size_t i = 0; i < flags.size(); ++i) {
            if (flags[i]) continue;
            const std::uint64_t p = first_odd + 2 * i;
            ++count;
            if (!f(p, count)) return;
        }
    }
}

} // namespace primelab
