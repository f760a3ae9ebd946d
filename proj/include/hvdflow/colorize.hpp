#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hvdflow/grid.hpp"

namespace hvdflow {

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // interleaved RGB, row-major

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), pixels(3u * w * h, 255) {}
};

// 55-entry color wheel over the RY/YG/GC/CB/BM/MR transitions, values in [0,1].
const std::vector<std::array<double, 3>>& flow_color_wheel();

// RGB for one flow vector with magnitudes normalized by max_mag; zero flow is
// white, full magnitude is the saturated wheel color.
std::array<std::uint8_t, 3> flow_color(double fx, double fy, double max_mag);

// Colorizes a flow field. max_mag <= 0 selects the 99th percentile of the
// known-flow magnitudes (robust to unknown-flow sentinels).
RgbImage colorize_flow(const FlowField& v, double max_mag = 0.0);

}  // namespace hvdflow
