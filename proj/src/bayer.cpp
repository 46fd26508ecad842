#include "qburst/bayer.hpp"

#include "qburst/image.hpp"

namespace qburst {

std::string_view to_string(BayerPattern pattern) noexcept {
    switch (pattern) {
        case BayerPattern::RGGB: return "RGGB";
        case BayerPattern::GRBG: return "GRBG";
        case BayerPattern::BGGR: return "BGGR";
        case BayerPattern::GBRG: return "GBRG";
    }
    return "?";
}

std::optional<BayerPattern> parse_bayer(std::string_view name) noexcept {
    for (auto p : kAllBayerPatterns) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

std::uint32_t bayer_code(std::optional<BayerPattern> pattern) noexcept {
    return pattern ? static_cast<std::uint32_t>(*pattern) + 1 : 0;
}

std::optional<BayerPattern> bayer_from_code(std::uint32_t code) {
    if (code == 0) return std::nullopt;
    if (code > 4) throw InvalidArgument("unknown Bayer pattern code " + std::to_string(code));
    return static_cast<BayerPattern>(code - 1);
}

}  // namespace qburst
