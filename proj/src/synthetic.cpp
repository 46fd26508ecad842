#include "qburst/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qburst/rng.hpp"

namespace qburst {

namespace {

double lattice(std::int64_t ix, std::int64_t iy, std::uint64_t seed) noexcept {
    const auto h = mix64(seed ^ mix64(static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ull ^
                                      static_cast<std::uint64_t>(iy)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth_noise(double x, double y, double scale, std::uint64_t seed) noexcept {
    const double u = x / scale;
    const double v = y / scale;
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const auto ix = static_cast<std::int64_t>(fu);
    const auto iy = static_cast<std::int64_t>(fv);
    auto fade = [](double t) { return t * t * (3.0 - 2.0 * t); };
    const double tu = fade(u - fu);
    const double tv = fade(v - fv);
    const double a = lattice(ix, iy, seed);
    const double b = lattice(ix + 1, iy, seed);
    const double c = lattice(ix, iy + 1, seed);
    const double d = lattice(ix + 1, iy + 1, seed);
    return (a * (1 - tu) + b * tu) * (1 - tv) + (c * (1 - tu) + d * tu) * tv;
}

struct Texture {
    std::uint64_t seed;
    double scale;
    bool color;

    void sample(double x, double y, double* rgb) const noexcept {
        const double lum = value_noise(x, y, scale, seed);
        for (int c = 0; c < 3; ++c) {
            const double chroma = color ? smooth_noise(x, y, 2.0 * scale, seed + 101 + c) : lum;
            rgb[c] = std::clamp(0.75 * lum + 0.25 * chroma, 0.0, 1.0);
        }
    }
};

}  // namespace

double value_noise(double x, double y, double scale, std::uint64_t seed) noexcept {
    const double v = 0.5 * smooth_noise(x, y, scale, seed) +
                     0.3 * smooth_noise(x, y, scale / 2, seed + 1) +
                     0.2 * smooth_noise(x, y, scale / 4, seed + 2);
    return std::clamp(0.5 + 1.8 * (v - 0.5), 0.02, 0.98);
}

std::vector<SrgbImage> render_scene(const SyntheticScene& scene) {
    if (scene.width <= 0 || scene.height <= 0 || scene.frames < 0) {
        throw InvalidArgument("synthetic scene needs positive dims");
    }
    const Texture background{mix64(scene.seed), scene.feature_scale, scene.color};
    const Texture foreground{mix64(scene.seed + 17), scene.feature_scale * 0.6, scene.color};
    const int channels = scene.color ? 3 : 1;
    const double half = 0.5 * scene.quad_size * std::min(scene.width, scene.height);
    constexpr int kSuper = 3;

    std::vector<SrgbImage> frames;
    frames.reserve(static_cast<std::size_t>(scene.frames));
    for (int t = 0; t < scene.frames; ++t) {
        const double ox = scene.velocity_x * t;
        const double oy = scene.velocity_y * t;
        const double angle = scene.rotation * t * std::numbers::pi / 180.0;
        const double ca = std::cos(angle);
        const double sa = std::sin(angle);
        const double qx = 0.5 * scene.width + ox;
        const double qy = 0.5 * scene.height + oy;

        Image img(scene.width, scene.height, channels);
        for (int y = 0; y < scene.height; ++y) {
            for (int x = 0; x < scene.width; ++x) {
                double acc[3] = {0.0, 0.0, 0.0};
                for (int sy = 0; sy < kSuper; ++sy) {
                    for (int sx = 0; sx < kSuper; ++sx) {
                        const double px = x + (sx + 0.5) / kSuper - 0.5;
                        const double py = y + (sy + 0.5) / kSuper - 0.5;
                        double rgb[3];
                        if (scene.motion == SceneMotion::Pan) {
                            background.sample(px - ox, py - oy, rgb);
                        } else {
                            // Quad-local coordinates.
                            const double lx = ca * (px - qx) + sa * (py - qy);
                            const double ly = -sa * (px - qx) + ca * (py - qy);
                            if (std::abs(lx) <= half && std::abs(ly) <= half) {
                                foreground.sample(lx, ly, rgb);
                            } else {
                                background.sample(px, py, rgb);
                            }
                        }
                        for (int c = 0; c < 3; ++c) acc[c] += rgb[c];
                    }
                }
                if (channels == 3) {
                    for (int c = 0; c < 3; ++c) img.at(x, y, c) = acc[c] / (kSuper * kSuper);
                } else {
                    img.at(x, y) = acc[0] / (kSuper * kSuper);
                }
            }
        }
        frames.push_back(SrgbImage::from(std::move(img)));
    }
    return frames;
}

}  // namespace qburst
