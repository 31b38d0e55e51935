#pragma once

#include <cstdint>

namespace stgnn {

/// Seeded xorshift64* generator.
///
/// The algorithm and constants are part of the reproducibility contract:
///   seeding:  state = splitmix64(seed), replaced by 0x9E3779B97F4A7C15 if zero
///   step:     x ^= x >> 12; x ^= x << 25; x ^= x >> 27
///   output:   x * 0x2545F4914F6CDD1D
/// uniform() takes the top 53 bits of the output, scaled into [0, 1).
/// normal() is Box-Muller over two uniform() draws, one normal per call.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t state() const noexcept { return state_; }

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept;
    /// Uniform integer in [0, bound); bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace stgnn
