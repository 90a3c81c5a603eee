#pragma once

// On-disk cache of exact (n, pi(n)) pairs: one `n<TAB>pi_n` record per line,
// ascending n, no header.

#include "primelab/sieve.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace primelab {

// PRIME_LAB_CACHE if set, otherwise ./cache.
std::filesystem::path default_cache_dir();

// Throws Error on malformed lines, non-ascending n or decreasing pi.
std::vector<PiCheckpoint> read_checkpoints(std::istream& in);
void write_checkpoints(std::ostream& out, std::span<const PiCheckpoint> cps);

class CheckpointCache {
public:
    explicit CheckpointCache(std::filesystem::path dir);

    const std::filesystem::path& file() const noexcept { return file_; }

    // Loads the file if present. A corrupt file is discarded (returns false).
    bool load();
    void save() const;

    std::optional<std::uint64_t> lookup(std::uint64_t n) const;
    void insert(std::span<const PiCheckpoint> cps);
    std::size_t size() const noexcept { return entries_.size(); }

    // pi at each n, using cached values where present and sieving the rest.
    // Newly computed values are inserted but not saved.
    std::vector<PiCheckpoint> resolve(const SegmentedSieve& sieve, std::span<const std::uint64_t> ns);

private:
    std::filesystem::path file_;
    std::map<std::uint64_t, std::uint64_t> entries_;
};

} // namespace primelab
