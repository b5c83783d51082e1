#pragma once

#include <cstdint>

namespace hypersurf {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// Draw i (0-based) of a stream with key K is
///     fmix64(K + (i + 1) * 0x9E3779B97F4A7C15)
/// where fmix64(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///                   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31.
/// This is the reference SplitMix64 sequence seeded with K, so any language
/// with 64-bit wrapping arithmetic reproduces it bit for bit. Uniform doubles
/// take the top 53 bits: (draw >> 11) * 2^-53, which lies in [0, 1).
class CounterRng {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Random access to draw `index` without advancing.
    constexpr std::uint64_t at(std::uint64_t index) const noexcept {
        return mix(key_ + (index + 1) * kGamma);
    }

    constexpr std::uint64_t next_u64() noexcept { return at(counter_++); }

    constexpr double next_uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by multiply-shift; bound must be positive.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    /// Key of independent sub-stream `stream`: draw `stream` of this generator's key.
    constexpr std::uint64_t derive_key(std::uint64_t stream) const noexcept { return at(stream); }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace hypersurf
