#pragma once

#include <filesystem>
#include <stdexcept>

#include "qburst/image.hpp"
#include "qburst/quanta_sim.hpp"

namespace qburst {

class PngError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads 8- or 16-bit gray/RGB(A)/palette PNGs into [0,1]. Alpha is dropped,
/// gray+alpha becomes one channel.
SrgbImage read_png(const std::filesystem::path& path);

/// Writes values clamped to [0,1] at the given bit depth (8 or 16).
void write_png(const std::filesystem::path& path, const Image& img, int bit_depth = 16);

/// 16-bit gray PNG, count k stored as k * floor(65535 / n).
void write_nano_burst_png(const std::filesystem::path& path, const NanoBurst& nb);
NanoBurst read_nano_burst_png(const std::filesystem::path& path, int n_frames,
                              std::optional<BayerPattern> pattern);

/// Level step used by the nano-burst PNG encoding.
constexpr unsigned nano_burst_png_step(int n_frames) noexcept {
    return 65535u / static_cast<unsigned>(n_frames);
}

}  // namespace qburst
