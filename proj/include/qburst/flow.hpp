#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "qburst/image.hpp"

namespace qburst {

/// Per-pixel displacement: pixel p of the source frame corresponds to
/// p + (dx, dy) in the target frame.
class FlowField {
public:
    FlowField() = default;
    FlowField(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    double dx(int x, int y) const noexcept { return dx_[idx(x, y)]; }
    double dy(int x, int y) const noexcept { return dy_[idx(x, y)]; }
    bool valid(int x, int y) const noexcept { return valid_[idx(x, y)] != 0; }

    void set(int x, int y, double dx, double dy, bool valid = true) noexcept {
        const auto i = idx(x, y);
        dx_[i] = dx;
        dy_[i] = dy;
        valid_[i] = valid ? 1 : 0;
    }
    void set_valid(int x, int y, bool valid) noexcept { valid_[idx(x, y)] = valid ? 1 : 0; }

    /// Squared displacement magnitude.
    double magnitude2(int x, int y) const noexcept {
        const auto i = idx(x, y);
        return dx_[i] * dx_[i] + dy_[i] * dy_[i];
    }

    static FlowField zero(int width, int height) { return FlowField(width, height); }
    /// Constant displacement everywhere, all valid.
    static FlowField constant(int width, int height, double dx, double dy);

private:
    std::size_t idx(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> dx_;
    std::vector<double> dy_;
    std::vector<std::uint8_t> valid_;
};

struct BlockMatchParams {
    int patch = 16;
    int radius = 8;
    int levels = 3;
    /// Patches whose best mean absolute difference exceeds this are marked
    /// invalid. Infinity disables the check.
    double max_sad = std::numeric_limits<double>::infinity();
    /// Optional level-dependent threshold, called with the mean of the source
    /// patch; overrides max_sad when set.
    std::function<double(double)> max_sad_at_level;
};

/// Integer block matching, coarse to fine over a 2x mean-pooled pyramid.
///
/// For every patch of `src` the displacement d minimising the mean absolute
/// difference against `target` shifted by d is found within `radius` of the
/// prediction from the coarser level (zero is always searched too). Ties go
/// to the smallest |d|, then lexicographic (dy, dx). Multi-channel input is
/// matched on its channel mean.
FlowField block_match_flow(const Image& src, const Image& target,
                           const BlockMatchParams& params = {});

struct WarpResult {
    Image image;
    /// 1 where the sample was in bounds and the flow valid.
    std::vector<std::uint8_t> valid;
};

/// Backward warp: out(p) = img(p + flow(p)), bilinear.
WarpResult warp(const Image& img, const FlowField& flow);

}  // namespace qburst
