#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace authorbench {

/// SplitMix64 (Steele, Lea, Flood 2014). The stream is part of the sample
/// file contract: the same (seed, stream) pair yields the same draws on every
/// platform.
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    /// Independent stream for repetition `stream` of `seed`: the initial
    /// state is mix(seed) ^ mix(stream + 1), where mix is one SplitMix64 step
    /// from the given state.
    static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next() noexcept;

    /// Uniform integer in [0, bound) by rejection; bound must be > 0.
    std::uint64_t uniform(std::uint64_t bound) noexcept;

    /// Uniform real in [0, 1) from the top 53 bits.
    double uniform_real() noexcept;

    /// Fisher-Yates, iterating i = n-1 .. 1 and swapping with uniform(i + 1).
    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace authorbench
