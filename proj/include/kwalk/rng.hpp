#pragma once

#include <cstdint>

namespace kwalk {

namespace detail {

/// 64-bit finalizer from SplitMix64 (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

/// Derive the i-th sub-seed of a master seed. This is the (i+1)-th output of
/// the SplitMix64 stream rooted at `seed`, so sub-streams never overlap the
/// master stream and are stable regardless of evaluation order. All trial,
/// walker, and scenario seeds in the library are derived through this single
/// function.
inline constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return detail::mix64(seed + (index + 1) * detail::kGolden);
}

/// Counter-based generator: a Weyl counter pushed through the SplitMix64
/// finalizer. State is a single u64, so replay and per-walker streams are
/// cheap; quality is ample for sampling neighbor indices.
class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    /// Uniform integer in [0, bound) via the multiply-shift reduction
    /// (Lemire 2019). Bias is bound/2^64, negligible at graph degrees.
    constexpr std::uint32_t next_below(std::uint32_t bound) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

}  // namespace kwalk
