#pragma once

#include <cstdint>
#include <vector>

#include "qburst/image.hpp"

namespace qburst {

enum class SceneMotion {
    Pan,  ///< The whole texture translates.
    Quad, ///< A textured square moves and rotates over a static background.
};

struct SyntheticScene {
    int width = 128;
    int height = 128;
    int frames = 11;
    bool color = true;
    SceneMotion motion = SceneMotion::Pan;
    /// Pixels per frame.
    double velocity_x = 0.0;
    double velocity_y = 0.0;
    /// Quad rotation in degrees per frame.
    double rotation = 0.0;
    /// Quad edge as a fraction of min(width, height).
    double quad_size = 0.45;
    /// Lattice spacing of the coarsest noise octave, in pixels.
    double feature_scale = 12.0;
    std::uint64_t seed = 1;
};

/// Renders the scene; each pixel is the mean of a 3x3 supersample grid.
std::vector<SrgbImage> render_scene(const SyntheticScene& scene);

/// Smooth multi-octave value noise in [0,1] at continuous coordinates.
double value_noise(double x, double y, double scale, std::uint64_t seed) noexcept;

}  // namespace qburst
