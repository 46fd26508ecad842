#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace qburst {

enum class BayerPattern : std::uint8_t { RGGB, GRBG, BGGR, GBRG };

inline constexpr std::array<BayerPattern, 4> kAllBayerPatterns{
    BayerPattern::RGGB, BayerPattern::GRBG, BayerPattern::BGGR, BayerPattern::GBRG};

/// Channel (0=R, 1=G, 2=B) sampled at pixel (x, y). Tiling is anchored at (0,0).
constexpr int cfa_channel(BayerPattern pattern, int x, int y) noexcept {
    // Row-major layout of each 2x2 tile.
    constexpr int tiles[4][4] = {
        {0, 1, 1, 2},  // RGGB
        {1, 0, 2, 1},  // GRBG
        {2, 1, 1, 0},  // BGGR
        {1, 2, 0, 1},  // GBRG
    };
    return tiles[static_cast<int>(pattern)][(y & 1) * 2 + (x & 1)];
}

std::string_view to_string(BayerPattern pattern) noexcept;
std::optional<BayerPattern> parse_bayer(std::string_view name) noexcept;

/// On-disk code: 0 means monochrome / no CFA, 1..4 follow enum order.
std::uint32_t bayer_code(std::optional<BayerPattern> pattern) noexcept;
/// Inverse of bayer_code; throws InvalidArgument for unknown codes.
std::optional<BayerPattern> bayer_from_code(std::uint32_t code);

}  // namespace qburst
