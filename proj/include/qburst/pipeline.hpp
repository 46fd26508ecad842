#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qburst/bayer.hpp"
#include "qburst/demosaic.hpp"
#include "qburst/flow.hpp"
#include "qburst/merge.hpp"
#include "qburst/quanta_sim.hpp"

namespace qburst {

/// Odd-length run of nano-bursts sharing dims and CFA. The center frame is
/// the reference.
class BurstWindow {
public:
    explicit BurstWindow(std::vector<NanoBurst> frames);

    std::size_t size() const noexcept { return frames_.size(); }
    std::size_t center() const noexcept { return frames_.size() / 2; }
    const std::vector<NanoBurst>& frames() const noexcept { return frames_; }
    std::optional<BayerPattern> pattern() const noexcept { return frames_.front().pattern; }

private:
    std::vector<NanoBurst> frames_;
};

struct PipelineOptions {
    double alpha = 1.0;
    double dark_rate = 0.0;
    double gamma = kDefaultGamma;
    DemosaicMethod demosaic = DemosaicMethod::Bilinear;
    BlockMatchParams flow;
    /// Multiplier on the Bernoulli noise floor for the block-matching
    /// validity test; <= 0 disables masking.
    double validity_factor = 3.0;
    bool white_balance = false;
    int threads = 1;
};

/// Per-frame inversion and demosaic; output in linear intensity.
Image invert_frame(const NanoBurst& nb, const PipelineOptions& opts);

/// Mean absolute difference expected between two independent inverted
/// frames of the same scene at linear level `level`.
double sad_noise_floor(double level, int n_frames, double alpha) noexcept;

struct AlignedBurst {
    std::vector<Image> frames;
    std::vector<FlowField> flows;
};

/// Inverts every frame and estimates flow from the center frame into each.
AlignedBurst align_burst(const BurstWindow& window, const PipelineOptions& opts);

/// Linear-intensity result of the merge, before white balance and encoding.
Image reconstruct_linear(const BurstWindow& window, const MergeConfig& cfg,
                         const PipelineOptions& opts);

/// Full pipeline: invert, demosaic, align to center, merge, optional gray
/// world, gamma encode to [0,1].
SrgbImage reconstruct(const BurstWindow& window, const MergeConfig& cfg,
                      const PipelineOptions& opts = {});

/// value^(1/gamma), clamped to [0,1].
SrgbImage gamma_encode(const Image& linear, double gamma = kDefaultGamma);

}  // namespace qburst
