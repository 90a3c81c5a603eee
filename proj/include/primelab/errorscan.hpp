#pragma once

// Error-term scans of pi(n) - Li(n): bound checks against threshold-scaled
// windows, interval comparisons and sign-change detection.

#include "primelab/checkpoint_cache.hpp"
#include "primelab/logint.hpp"
#include "primelab/sieve.hpp"
#include "primelab/threshold.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace primelab {

struct ScanRecord {
    std::uint64_t n = 0;
    std::uint64_t pi_n = 0;
    double li_n = 0.0;
    double li_error = 0.0;
    double delta = 0.0;   // pi_n - li_n
    double sqrt_li = 0.0;
    double ratio = 0.0;   // |delta| / sqrt_li
    double q_value = 0.0; // Q(n)
    bool bound_ok = false; // ratio < q_value
    int sign = 0;

    // |delta| < 2 M(m) sqrt(m), with m instantiated as li_n and as pi_n.
    double window_m_li = 0.0;
    bool window_ok_li = false;
    double window_m_pi = 0.0;
    bool window_ok_pi = false;
};

ScanRecord make_scan_record(const PiCheckpoint& cp, const LiValue& li, const ThresholdFunction& threshold);

struct ScanOptions {
    double spacing = 1.25;
    std::uint64_t first = 100;
    bool decade_anchors = true; // add 10^3, 10^4, ... <= limit
    std::vector<std::uint64_t> anchors;
    int jobs = 0;
};

// One record per checkpoint in ascending n. DomainError for limit < 100.
// When `cache` is given, pi values are taken from / added to it.
std::vector<ScanRecord> scan(const SegmentedSieve& sieve, std::uint64_t limit, const ThresholdFunction& threshold,
                             const ScanOptions& opts = {}, CheckpointCache* cache = nullptr);

struct IntervalRecord {
    std::uint64_t n0 = 0;
    std::uint64_t n1 = 0;
    std::uint64_t pi_diff = 0; // primes in (n0, n1]
    double li_diff = 0.0;      // integral of dx / log x over [n0, n1]
    double excess = 0.0;       // pi_diff - li_diff
};

IntervalRecord interval_compare(const SegmentedSieve& sieve, std::uint64_t n0, std::uint64_t n1);

struct DeltaSample {
    std::uint64_t n = 0;
    double delta = 0.0;
};

// n is the first integer carrying the new sign.
struct Crossing {
    std::uint64_t n = 0;
    double delta_before = 0.0;
    double delta_after = 0.0;

    friend bool operator==(const Crossing&, const Crossing&) = default;
};

int sign_of(double x);

// Sign changes between consecutive samples (samples in ascending n).
std::vector<Crossing> detect_sign_changes(std::span<const DeltaSample> samples);

// Every n in [3, limit] where sign(pi(n) - Li(n)) differs from sign at n - 1.
// Exact over all integers: between primes delta only decreases, so far from
// zero whole runs of primes are skipped with a provable bound.
std::vector<Crossing> sign_change_search(const SegmentedSieve& sieve, std::uint64_t limit);

struct FamilyFit {
    std::string family;
    double alpha = 0.0;
    std::optional<double> c; // empty when no record qualifies
};

struct FitSummary {
    double max_ratio = 0.0;
    std::uint64_t argmax_n = 0;
    std::vector<FamilyFit> fits;
    std::optional<std::uint64_t> last_failure_n; // largest n with bound_ok false
};

// Default families: log, loglog, power(alpha = 0.25).
std::vector<ThresholdFunction> default_fit_families();

// For each family, the smallest scale c with ratio < c * Q_unit(n) holding for
// every record with n >= min_n (reported as the supremum of ratio / Q_unit).
// EmptyInput for fewer than two records.
FitSummary threshold_fit(std::span<const ScanRecord> records, std::span<const ThresholdFunction> families,
                         std::uint64_t min_n = 1000);

} // namespace primelab
