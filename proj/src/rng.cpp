#include "authorbench/rng.hpp"

namespace authorbench {

namespace {

std::uint64_t mix(std::uint64_t state) noexcept {
    SplitMix64 rng(state);
    return rng.next();
}

} // namespace

SplitMix64 SplitMix64::for_stream(std::uint64_t seed, std::uint64_t stream) noexcept {
    return SplitMix64(mix(seed) ^ mix(stream + 1));
}

std::uint64_t SplitMix64::next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::uniform(std::uint64_t bound) noexcept {
    // Reject the low (2^64 mod bound) values so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = next();
        if (x >= threshold) return x % bound;
    }
}

double SplitMix64::uniform_real() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

} // namespace authorbench
