#pragma once

#include <cstdint>
#include <string_view>

namespace artism {

/// SplitMix64 finalizer: a bijective 64-bit mix. See docs/determinism.md.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Combines a base seed with up to two discriminators into a new seed.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept {
    return splitmix64(splitmix64(base ^ splitmix64(a)) ^ splitmix64(b + 0x632BE59BD9B4E019ULL));
}

/// xorshift64* generator. Bit-stable across platforms: only 64-bit unsigned
/// shifts, xors and one wrapping multiply.
class XorShift64Star {
public:
    explicit constexpr XorShift64Star(std::uint64_t seed) noexcept : state_(seed == 0 ? 0x9E3779B97F4A7C15ULL : seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }

    /// Value in [0, bound) by plain modulo reduction (bound > 0).
    constexpr std::uint64_t below(std::uint64_t bound) noexcept { return next() % bound; }

    /// Top 8 bits of the next output; used to index 256-entry tables.
    constexpr std::uint8_t byte() noexcept { return static_cast<std::uint8_t>(next() >> 56); }

    /// Uniform double in [0, 1) from the top 53 bits.
    constexpr double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    constexpr std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// hash64(seed, digest) = splitmix64(seed XOR first 64 bits of the hex digest, big-endian).
std::uint64_t hash64(std::uint64_t seed, std::string_view digest_hex);

/// Low 64 bits (last 8 bytes, big-endian) of SHA-256(be64(global_seed) || agent_id).
std::uint64_t derive_agent_seed(std::uint64_t global_seed, std::string_view agent_id);

}  // namespace artism
