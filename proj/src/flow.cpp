#include "qburst/flow.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

namespace qburst {

FlowField::FlowField(int width, int height)
    : width_(width),
      height_(height),
      dx_(static_cast<std::size_t>(width) * height, 0.0),
      dy_(static_cast<std::size_t>(width) * height, 0.0),
      valid_(static_cast<std::size_t>(width) * height, 1) {}

FlowField FlowField::constant(int width, int height, double dx, double dy) {
    FlowField f(width, height);
    std::fill(f.dx_.begin(), f.dx_.end(), dx);
    std::fill(f.dy_.begin(), f.dy_.end(), dy);
    return f;
}

namespace {

Image pool2(const Image& img) {
    Image out(img.width() / 2, img.height() / 2, 1);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            out.at(x, y) = 0.25 * (img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) +
                                   img.at(2 * x, 2 * y + 1) + img.at(2 * x + 1, 2 * y + 1));
        }
    }
    return out;
}

struct Displacement {
    int dx = 0;
    int dy = 0;
};

struct TileGrid {
    int patch = 0;
    int cols = 0;
    int rows = 0;
    std::vector<Displacement> disp;
    std::vector<double> cost;

    TileGrid(int width, int height, int patch_size)
        : patch(patch_size),
          cols((width + patch_size - 1) / patch_size),
          rows((height + patch_size - 1) / patch_size),
          disp(static_cast<std::size_t>(cols) * rows),
          cost(static_cast<std::size_t>(cols) * rows, 0.0) {}

    Displacement& at(int tx, int ty) { return disp[static_cast<std::size_t>(ty) * cols + tx]; }
    const Displacement& at(int tx, int ty) const {
        return disp[static_cast<std::size_t>(ty) * cols + tx];
    }
};

// Mean absolute difference over the part of the tile whose displaced
// position is inside the target. Infinite when less than half overlaps.
double tile_cost(const Image& src, const Image& target, int x0, int y0, int x1, int y1,
                 int dx, int dy) {
    const int w = target.width();
    const int h = target.height();
    const int xa = std::max(x0, -dx);
    const int xb = std::min(x1, w - dx);
    const int ya = std::max(y0, -dy);
    const int yb = std::min(y1, h - dy);
    const long area = static_cast<long>(x1 - x0) * (y1 - y0);
    if (xb <= xa || yb <= ya) return std::numeric_limits<double>::infinity();
    const long overlap = static_cast<long>(xb - xa) * (yb - ya);
    if (2 * overlap < area) return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (int y = ya; y < yb; ++y) {
        const double* s = &src.data()[src.index(0, y)];
        const double* t = &target.data()[target.index(0, y + dy)];
        for (int x = xa; x < xb; ++x) sum += std::abs(s[x] - t[x + dx]);
    }
    return sum / static_cast<double>(overlap);
}

// Strict ordering: lower cost, then smaller |d|^2, then (dy, dx).
bool better(double cost, Displacement d, double best_cost, Displacement best) {
    if (cost != best_cost) return cost < best_cost;
    const int m = d.dx * d.dx + d.dy * d.dy;
    const int bm = best.dx * best.dx + best.dy * best.dy;
    if (m != bm) return m < bm;
    return std::tie(d.dy, d.dx) < std::tie(best.dy, best.dx);
}

void match_level(const Image& src, const Image& target, TileGrid& grid, const TileGrid* coarse,
                 int radius) {
    const int w = src.width();
    const int h = src.height();
    for (int ty = 0; ty < grid.rows; ++ty) {
        for (int tx = 0; tx < grid.cols; ++tx) {
            const int x0 = tx * grid.patch;
            const int y0 = ty * grid.patch;
            const int x1 = std::min(w, x0 + grid.patch);
            const int y1 = std::min(h, y0 + grid.patch);

            Displacement pred;
            if (coarse) {
                const int cx = std::min(coarse->cols - 1, ((x0 + x1) / 2 / 2) / coarse->patch);
                const int cy = std::min(coarse->rows - 1, ((y0 + y1) / 2 / 2) / coarse->patch);
                pred = coarse->at(cx, cy);
                pred.dx *= 2;
                pred.dy *= 2;
            }

            Displacement best;
            double best_cost = std::numeric_limits<double>::infinity();
            bool have = false;
            auto consider = [&](Displacement d) {
                const double c = tile_cost(src, target, x0, y0, x1, y1, d.dx, d.dy);
                if (!have || better(c, d, best_cost, best)) {
                    best = d;
                    best_cost = c;
                    have = true;
                }
            };
            for (int dy = pred.dy - radius; dy <= pred.dy + radius; ++dy) {
                for (int dx = pred.dx - radius; dx <= pred.dx + radius; ++dx) consider({dx, dy});
            }
            const bool zero_covered =
                std::abs(pred.dx) <= radius && std::abs(pred.dy) <= radius;
            if (!zero_covered) {
                for (int dy = -radius; dy <= radius; ++dy) {
                    for (int dx = -radius; dx <= radius; ++dx) consider({dx, dy});
                }
            }
            grid.at(tx, ty) = best;
            grid.cost[static_cast<std::size_t>(ty) * grid.cols + tx] = best_cost;
        }
    }
}

}  // namespace

FlowField block_match_flow(const Image& src, const Image& target,
                           const BlockMatchParams& params) {
    if (params.patch <= 0 || params.radius <= 0 || params.levels <= 0) {
        throw InvalidArgument("block matching parameters must be positive");
    }
    if (src.width() != target.width() || src.height() != target.height() ||
        src.channels() != target.channels()) {
        throw InvalidArgument("block matching needs images of equal shape");
    }
    if (src.width() < params.patch || src.height() < params.patch) {
        throw InvalidArgument("image smaller than the block-matching patch");
    }

    std::vector<Image> src_pyr{src.gray()};
    std::vector<Image> tgt_pyr{target.gray()};
    while (static_cast<int>(src_pyr.size()) < params.levels &&
           src_pyr.back().width() / 2 >= params.patch &&
           src_pyr.back().height() / 2 >= params.patch) {
        src_pyr.push_back(pool2(src_pyr.back()));
        tgt_pyr.push_back(pool2(tgt_pyr.back()));
    }

    std::optional<TileGrid> coarse;
    for (int level = static_cast<int>(src_pyr.size()) - 1; level >= 0; --level) {
        const auto& s = src_pyr[level];
        TileGrid grid(s.width(), s.height(), params.patch);
        match_level(s, tgt_pyr[level], grid, coarse ? &*coarse : nullptr, params.radius);
        coarse = std::move(grid);
    }

    const TileGrid& fine = *coarse;
    std::vector<double> thresholds(fine.disp.size(), params.max_sad);
    if (params.max_sad_at_level) {
        const Image& s = src_pyr.front();
        for (int ty = 0; ty < fine.rows; ++ty) {
            for (int tx = 0; tx < fine.cols; ++tx) {
                double sum = 0.0;
                int count = 0;
                for (int y = ty * fine.patch; y < std::min(s.height(), (ty + 1) * fine.patch); ++y) {
                    for (int x = tx * fine.patch; x < std::min(s.width(), (tx + 1) * fine.patch); ++x) {
                        sum += s.at(x, y);
                        ++count;
                    }
                }
                thresholds[static_cast<std::size_t>(ty) * fine.cols + tx] =
                    params.max_sad_at_level(sum / count);
            }
        }
    }
    FlowField flow(src.width(), src.height());
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < src.width(); ++x) {
            const int tx = x / fine.patch;
            const int ty = y / fine.patch;
            const auto d = fine.at(tx, ty);
            const std::size_t t = static_cast<std::size_t>(ty) * fine.cols + tx;
            flow.set(x, y, d.dx, d.dy, fine.cost[t] <= thresholds[t]);
        }
    }
    return flow;
}

WarpResult warp(const Image& img, const FlowField& flow) {
    if (img.width() != flow.width() || img.height() != flow.height()) {
        throw InvalidArgument("warp: flow and image dims differ");
    }
    const int w = img.width();
    const int h = img.height();
    const int ch = img.channels();
    WarpResult out{Image(w, h, ch), std::vector<std::uint8_t>(img.pixel_count(), 0)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double sx = x + flow.dx(x, y);
            const double sy = y + flow.dy(x, y);
            const bool inside = sx >= 0.0 && sy >= 0.0 && sx <= w - 1 && sy <= h - 1;
            const double cx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
            const double cy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
            const int x0 = static_cast<int>(std::floor(cx));
            const int y0 = static_cast<int>(std::floor(cy));
            const int x1 = std::min(x0 + 1, w - 1);
            const int y1 = std::min(y0 + 1, h - 1);
            const double fx = cx - x0;
            const double fy = cy - y0;
            for (int c = 0; c < ch; ++c) {
                double v = img.at(x0, y0, c);
                // Skip zero-weight taps so integer offsets copy exactly.
                if (fx != 0.0 || fy != 0.0) {
                    v = (1 - fx) * (1 - fy) * img.at(x0, y0, c) + fx * (1 - fy) * img.at(x1, y0, c) +
                        (1 - fx) * fy * img.at(x0, y1, c) + fx * fy * img.at(x1, y1, c);
                }
                out.image.at(x, y, c) = v;
            }
            out.valid[static_cast<std::size_t>(y) * w + x] = inside && flow.valid(x, y);
        }
    }
    return out;
}

}  // namespace qburst
