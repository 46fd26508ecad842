#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qburst/bayer.hpp"
#include "qburst/image.hpp"
#include "qburst/rng.hpp"

namespace qburst {

class PhotonCube;

inline constexpr double kDefaultGamma = 2.2;

/// Poisson rate per pixel-channel: lambda = alpha * x_lin + dark_rate.
struct PhotonRateMap {
    Image lambda;
    double alpha = 1.0;
    double dark_rate = 0.0;
};

/// One binary SPAD exposure, one bit per (mosaiced) pixel, stored unpacked.
struct BinaryFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;
    std::optional<BayerPattern> pattern;

    std::uint8_t at(int x, int y) const noexcept {
        return bits[static_cast<std::size_t>(y) * width + x];
    }
    friend bool operator==(const BinaryFrame&, const BinaryFrame&) = default;
};

/// Average of n binary frames. Stores the detection counts so every value
/// stays on the k/n lattice.
struct NanoBurst {
    int width = 0;
    int height = 0;
    int n_frames = 0;
    std::vector<std::uint16_t> counts;
    std::optional<BayerPattern> pattern;

    double value(int x, int y) const noexcept {
        return static_cast<double>(counts[static_cast<std::size_t>(y) * width + x]) / n_frames;
    }
    /// Values k/n as a one-channel image.
    Image to_image() const;
    /// log2(n + 1), e.g. 3 for n = 7.
    double bit_depth() const noexcept;

    friend bool operator==(const NanoBurst&, const NanoBurst&) = default;
};

enum class SamplingProtocol {
    BlurFree7,   ///< 7 binary samples drawn from each GT frame.
    Realistic1,  ///< 1 binary sample per GT frame, 7 consecutive samples per nano-burst.
};

inline constexpr int kNanoBurstFrames = 7;

LinearImage gamma_linearize(const SrgbImage& img, double gamma = kDefaultGamma);

PhotonRateMap make_rate_map(const LinearImage& lin, double alpha, double dark_rate = 0.0);

/// Spatial mean of lambda over all pixel-channels.
double expected_ppp(const PhotonRateMap& rate);

/// Detection probability 1 - exp(-lambda).
double detection_probability(double lambda) noexcept;

/// Bernoulli(1 - exp(-lambda)) per pixel. For 3-channel rates a pattern is
/// required and only the CFA channel at each pixel is sampled.
BinaryFrame sample_binary_frame(const PhotonRateMap& rate, const RngSpec& rng,
                                std::uint64_t frame_index,
                                std::optional<BayerPattern> pattern = std::nullopt,
                                int threads = 1);

/// Keeps the CFA-selected channel of a 3-channel image.
Image mosaic(const Image& img, BayerPattern pattern);

/// Sum of n independent mosaiced binary frames, frames numbered from first_frame.
NanoBurst make_nano_burst(const PhotonRateMap& rate, int n, std::optional<BayerPattern> pattern,
                          const RngSpec& rng, std::uint64_t first_frame = 0, int threads = 1);

/// Sum of existing binary frames into one nano-burst.
NanoBurst accumulate_frames(std::span<const BinaryFrame> frames);

struct SimulationParams {
    SamplingProtocol protocol = SamplingProtocol::BlurFree7;
    double alpha = 1.0;
    double dark_rate = 0.0;
    double gamma = kDefaultGamma;
    double fps = 0.0;
    std::optional<BayerPattern> pattern;
    RngSpec rng;
    int threads = 1;
};

struct SimulatedSequence {
    std::vector<NanoBurst> bursts;
    /// Index of the GT frame each nano-burst is evaluated against.
    std::vector<std::size_t> gt_index;
    std::vector<BinaryFrame> frames;
    /// Mean expected PPP over all GT frames.
    double expected_ppp = 0.0;
};

SimulatedSequence simulate_burst_sequence(std::span<const SrgbImage> gt,
                                          const SimulationParams& params);

/// Wraps the binary stack of a simulated sequence as a photon cube.
PhotonCube to_photon_cube(const SimulatedSequence& seq, const SimulationParams& params);

}  // namespace qburst
