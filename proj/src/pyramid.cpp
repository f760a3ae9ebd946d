#include "hvdflow/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hvdflow/filters.hpp"

namespace hvdflow {

Pyramid build_pyramid(const ImagePair& pair, double scale, int min_side) {
    if (scale <= 0.0 || scale >= 1.0)
        throw std::invalid_argument("build_pyramid: scale must lie in (0,1)");
    if (min_side < 8) throw std::invalid_argument("build_pyramid: min_side must be >= 8");
    if (!pair.frame0.same_size(pair.frame1))
        throw std::invalid_argument("build_pyramid: frame dimensions differ");
    if (pair.width() < min_side || pair.height() < min_side)
        throw std::invalid_argument("build_pyramid: image smaller than min_side");

    // Anti-alias strength matched to the downsampling factor.
    const double sigma = 0.8 * std::sqrt(1.0 / (scale * scale) - 1.0);
    const int ksize = std::max(3, 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1);

    std::vector<ImagePair> fine_to_coarse;
    fine_to_coarse.push_back(pair);
    while (true) {
        const ImagePair& prev = fine_to_coarse.back();
        const int nw = static_cast<int>(std::floor(prev.width() * scale));
        const int nh = static_cast<int>(std::floor(prev.height() * scale));
        if (nw < min_side || nh < min_side) break;
        ImagePair next;
        next.frame0 = resample_bilinear(gaussian_smooth(prev.frame0, sigma, ksize), nw, nh);
        next.frame1 = resample_bilinear(gaussian_smooth(prev.frame1, sigma, ksize), nw, nh);
        fine_to_coarse.push_back(std::move(next));
    }

    Pyramid pyr;
    pyr.scale_factor = scale;
    pyr.levels.assign(fine_to_coarse.rbegin(), fine_to_coarse.rend());
    return pyr;
}

}  // namespace hvdflow
