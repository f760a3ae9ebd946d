#pragma once

#include <vector>

#include "hvdflow/grid.hpp"

namespace hvdflow {

// Multi-resolution image pairs, coarsest level first.
struct Pyramid {
    std::vector<ImagePair> levels;
    double scale_factor = 0.70;

    int level_count() const { return static_cast<int>(levels.size()); }
    const ImagePair& coarsest() const { return levels.front(); }
    const ImagePair& finest() const { return levels.back(); }
};

// Finest level is the input; each coarser level is the previous one smoothed
// and resampled to floor(scale * dims). Construction stops before either side
// would drop below min_side.
Pyramid build_pyramid(const ImagePair& pair, double scale, int min_side);

}  // namespace hvdflow
