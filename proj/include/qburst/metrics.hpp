#pragma once

#include <cstddef>
#include <span>

#include "qburst/flow.hpp"
#include "qburst/image.hpp"

namespace qburst {

struct PsnrResult {
    double db = 0.0;
    /// Set when MSE is zero; db is then +inf.
    bool infinite = false;
};

/// 10 log10(peak^2 / MSE). Multi-channel images: PSNR per channel, then the
/// mean over channels with nonzero MSE.
PsnrResult psnr(const Image& a, const Image& b, double peak = 1.0);

double mse(const Image& a, const Image& b);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Mean SSIM over all fully-covered window positions, averaged over channels.
double ssim(const Image& a, const Image& b, const SsimParams& params = {});

struct WarpingError {
    /// 1e3 * mean squared difference.
    double e_star = 0.0;
    double e_warp = 0.0;
    std::size_t valid_pixels = 0;
};

/// flows[t] maps frame t into frame t+1. Invalid flow and out-of-bounds
/// samples are excluded from the mean.
WarpingError warping_error(std::span<const Image> recon, std::span<const FlowField> flows);

}  // namespace qburst
