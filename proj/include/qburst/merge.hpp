#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qburst/flow.hpp"
#include "qburst/image.hpp"
#include "qburst/quanta_sim.hpp"

namespace qburst {

enum class MergeMode { NaiveAverage, Adaptive, Wiener };

std::string_view to_string(MergeMode mode) noexcept;
std::optional<MergeMode> parse_merge_mode(std::string_view name) noexcept;

struct WienerParams {
    /// Tile edge, a power of two. Tiles overlap by half.
    int tile = 16;
    /// Per-pixel noise variance of one frame. When unset it is estimated per
    /// tile from the Bernoulli model at the center tile's mean intensity.
    std::optional<double> noise_variance;
    /// Binary frames per nano-burst and flux factor, for the estimate above.
    int n_frames = kNanoBurstFrames;
    double alpha = 1.0;
};

struct MergeConfig {
    /// out = center + delta * (fused - center)
    double delta = 0.05;
    double sigma_motion = 4.0;
    double tau_time = 4.0;
    MergeMode mode = MergeMode::Adaptive;
    WienerParams wiener;

    /// Throws InvalidArgument on out-of-range fields.
    void validate() const;
};

/// Linear intensity estimate from a nano-burst: -ln(1 - S/N) / alpha, with
/// S = N treated as N - 0.5 detections. Dark rate is subtracted before scaling.
LinearImage mle_invert(const NanoBurst& nb, double alpha = 1.0, double dark_rate = 0.0);

/// lambda estimate for S detections out of N.
double mle_lambda(int detections, int n_frames) noexcept;

/// Adaptive weights at one pixel. `flow_mag2[i]` is |flow_i|^2, invalid frames
/// get zero weight. Weights sum to 1 unless every frame is invalid.
void adaptive_weights(std::span<const double> flow_mag2, std::span<const std::uint8_t> valid,
                      const MergeConfig& cfg, std::span<double> weights);

/// Fuses frames aligned to the center frame (index size/2) and applies
/// residual modulation. `flows[i]` maps center pixels into frame i.
Image merge_burst(std::span<const Image> frames, std::span<const FlowField> flows,
                  const MergeConfig& cfg);

/// Overlapping-tile frequency-domain merge. For each tile and frequency the
/// alternate coefficient Z is pulled toward the center coefficient C:
///   Z' = C + s (Z - C),   s = |C - Z|^2 / (|C - Z|^2 + k sigma^2)
/// where k is the tile window energy for the difference of two frames.
/// sigma^2 = 0 gives the plain average, large sigma^2 the center frame.
Image wiener_merge(std::span<const Image> frames, std::span<const FlowField> flows,
                   const WienerParams& params);

/// Scales each channel by (mean of all channels) / (channel mean).
Image gray_world_wb(const Image& img);

/// Per-pixel variance of a linear estimate at mean intensity `level`.
double bernoulli_noise_variance(double level, int n_frames, double alpha) noexcept;

}  // namespace qburst
