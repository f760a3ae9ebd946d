#pragma once

#include <cstdint>
#include <vector>

#include "hvdflow/grid.hpp"

namespace hvdflow {

// Normalized 1-D Gaussian taps; size must be odd.
std::vector<double> gaussian_kernel_1d(double sigma, int size);

// Convolution with a normalized size x size Gaussian, replicate boundary.
ScalarGrid gaussian_smooth(const ScalarGrid& g, double sigma, int size);

// Bilinear resize with pixel-center sample mapping; sample coordinates are
// clamped to the source bounds so edge rows/columns replicate.
ScalarGrid resample_bilinear(const ScalarGrid& g, int new_w, int new_h);

struct WarpResult {
    ScalarGrid grid;
    // 1 where the sample position fell outside the source grid (the value is
    // then taken at the clamped position).
    std::vector<std::uint8_t> out_of_bounds;
};

// Samples g at (i + vx(i,j), j + vy(i,j)) with bilinear interpolation.
WarpResult warp_backward(const ScalarGrid& g, const FlowField& flow);

}  // namespace hvdflow
