#include "qburst/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qburst/parallel.hpp"

namespace qburst {

BurstWindow::BurstWindow(std::vector<NanoBurst> frames) : frames_(std::move(frames)) {
    if (frames_.empty() || frames_.size() % 2 == 0) {
        throw InvalidArgument("burst window needs an odd number of nano-bursts, got " +
                              std::to_string(frames_.size()));
    }
    const auto& ref = frames_.front();
    for (const auto& f : frames_) {
        if (f.width != ref.width || f.height != ref.height || f.pattern != ref.pattern ||
            f.n_frames != ref.n_frames) {
            throw InvalidArgument("burst window frames must share dims, pattern, and bit depth");
        }
    }
}

Image invert_frame(const NanoBurst& nb, const PipelineOptions& opts) {
    auto lin = mle_invert(nb, opts.alpha, opts.dark_rate);
    if (nb.pattern) return demosaic(lin.pixels, *nb.pattern, opts.demosaic);
    return std::move(lin.pixels);
}

double sad_noise_floor(double level, int n_frames, double alpha) noexcept {
    // E|X - Y| for two independent Gaussians of variance s^2 is 2 s / sqrt(pi).
    const double sigma = std::sqrt(bernoulli_noise_variance(level, n_frames, alpha));
    return 2.0 * sigma / std::sqrt(std::numbers::pi);
}

AlignedBurst align_burst(const BurstWindow& window, const PipelineOptions& opts) {
    const auto& bursts = window.frames();
    const std::size_t t = bursts.size();
    const std::size_t c = window.center();
    AlignedBurst out;
    out.frames.resize(t);
    out.flows.resize(t);
    parallel_for(t, opts.threads, [&](std::size_t i) { out.frames[i] = invert_frame(bursts[i], opts); });

    BlockMatchParams params = opts.flow;
    if (opts.validity_factor > 0.0) {
        const int n = bursts.front().n_frames;
        const double alpha = opts.alpha;
        const double factor = opts.validity_factor;
        params.max_sad_at_level = [=](double level) {
            return factor * sad_noise_floor(level, n, alpha);
        };
    }
    const Image& center = out.frames[c];
    parallel_for(t, opts.threads, [&](std::size_t i) {
        if (i == c) {
            out.flows[i] = FlowField::zero(center.width(), center.height());
        } else {
            out.flows[i] = block_match_flow(center, out.frames[i], params);
        }
    });
    return out;
}

Image reconstruct_linear(const BurstWindow& window, const MergeConfig& cfg,
                         const PipelineOptions& opts) {
    cfg.validate();
    const auto aligned = align_burst(window, opts);
    MergeConfig effective = cfg;
    effective.wiener.alpha = opts.alpha;
    effective.wiener.n_frames = window.frames().front().n_frames;
    return merge_burst(aligned.frames, aligned.flows, effective);
}

SrgbImage gamma_encode(const Image& linear, double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    Image out = linear;
    for (double& v : out.data()) {
        v = std::isfinite(v) ? std::clamp(std::pow(std::max(0.0, v), 1.0 / gamma), 0.0, 1.0) : 1.0;
    }
    return SrgbImage{std::move(out)};
}

SrgbImage reconstruct(const BurstWindow& window, const MergeConfig& cfg,
                      const PipelineOptions& opts) {
    Image linear = reconstruct_linear(window, cfg, opts);
    if (opts.white_balance && linear.channels() == 3) linear = gray_world_wb(linear);
    return gamma_encode(linear, opts.gamma);
}

}  // namespace qburst
