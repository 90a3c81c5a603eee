#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block of
// four 32-bit outputs is a pure function of (counter, key), so any trial can
// be regenerated independently of which thread runs it.

#include <array>
#include <cstdint>

namespace primelab {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

    static constexpr Key key_from(std::uint64_t seed) {
        return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    }

    // Uniform in [0, 1) with 32-bit resolution.
    static constexpr double to_unit(std::uint32_t x) { return x * (1.0 / 4294967296.0); }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

// SplitMix64 finaliser; derives independent seeds for numbered sub-experiments.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Sequential uniforms for one (stream, substream) pair: counter words 0-1 hold
// the substream, words 2-3 the block index.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t substream)
        : key_(Philox4x32::key_from(seed)),
          sub_lo_(static_cast<std::uint32_t>(substream)),
          sub_hi_(static_cast<std::uint32_t>(substream >> 32)) {}

    std::uint32_t next_u32() {
        if (used_ == 4) refill();
        return buf_[used_++];
    }

    double uniform() { return Philox4x32::to_unit(next_u32()); }

private:
    void refill() {
        buf_ = Philox4x32::block({sub_lo_, sub_hi_, static_cast<std::uint32_t>(index_),
                                  static_cast<std::uint32_t>(index_ >> 32)},
                                 key_);
        ++index_;
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::uint32_t sub_lo_, sub_hi_;
    std::uint64_t index_ = 0;
    Philox4x32::Counter buf_{};
    int used_ = 4;
};

} // namespace primelab
