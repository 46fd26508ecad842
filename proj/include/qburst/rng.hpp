#pragma once

#include <array>
#include <cstdint>

namespace qburst {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11). Stateless: output is a
/// pure function of (counter, key).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57;
    static constexpr std::uint32_t kW0 = 0x9E3779B9;
    static constexpr std::uint32_t kW1 = 0xBB67AE85;
};

/// Stream tags keep independent uses of one seed from colliding.
enum class RngStream : std::uint32_t { BinarySample = 0, Synthetic = 1, Selftest = 2 };

/// Counter-based random source. A draw depends only on
/// (seed, stream, frame, pixel, channel), never on call order.
struct RngSpec {
    std::uint64_t seed = 0;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint64_t frame, std::uint64_t pixel, std::uint32_t channel,
                   RngStream stream = RngStream::BinarySample) const noexcept {
        const Philox4x32::Counter ctr{
            static_cast<std::uint32_t>(pixel), static_cast<std::uint32_t>(pixel >> 32),
            static_cast<std::uint32_t>(frame),
            (static_cast<std::uint32_t>(frame >> 32) << 8) ^ (channel << 2) ^
                static_cast<std::uint32_t>(stream)};
        const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                                  static_cast<std::uint32_t>(seed >> 32)};
        const auto out = Philox4x32::generate(ctr, key);
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(out[0]) << 21) ^ (static_cast<std::uint64_t>(out[1]) >> 11);
        return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
    }
};

/// splitmix64 finalizer; used for documented sub-seed derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// 64-bit FNV-1a, stable across platforms.
constexpr std::uint64_t fnv1a64(const char* s, std::size_t n) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(s[i]);
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Sub-seed for a named sub-task: mix64(seed ^ fnv1a64(name)).
template <class Str>
std::uint64_t derive_seed(std::uint64_t seed, const Str& name) noexcept {
    return mix64(seed ^ fnv1a64(name.data(), name.size()));
}

}  // namespace qburst
