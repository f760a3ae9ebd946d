#pragma once

#include <cstdint>

#include "hvdflow/grid.hpp"

namespace hvdflow {

struct SyntheticPair {
    ImagePair pair;
    FlowField gt;
};

// Seeded uniform noise in [lo, hi], Gaussian smoothed. Deterministic across
// platforms (raw engine output, no distribution objects). The default range
// and smoothing keep gradients strong enough to pin subpixel motion while
// leaving headroom for brightness-perturbation experiments.
ScalarGrid noise_texture(int width, int height, std::uint64_t seed, double sigma = 1.0,
                         double lo = 0.10, double hi = 0.90);

// frame0 is frame1 backward-warped by the ground-truth flow, so the pair
// satisfies frame0(p) = frame1(p + gt(p)) exactly under bilinear sampling.
// Textures are generated with a margin and cropped so no warp sample clamps.
SyntheticPair make_translation_pair(int width, int height, double dx, double dy,
                                    std::uint64_t seed);

// Piecewise-constant horizontal flow: left half moves by (left_vx, 0), right
// half by (right_vx, 0), with a vertical seam at width/2.
SyntheticPair make_two_region_pair(int width, int height, double left_vx, double right_vx,
                                   std::uint64_t seed);

// frame1 -> (1 + gain) * frame1 + offset, clamped to [0,1].
ImagePair with_brightness_change(const ImagePair& pair, double gain, double offset);

}  // namespace hvdflow
