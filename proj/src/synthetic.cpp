#include "hvdflow/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hvdflow/filters.hpp"

namespace hvdflow {

namespace {

inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
}

ScalarGrid crop(const ScalarGrid& g, int x0, int y0, int w, int h) {
    ScalarGrid out(w, h);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) out.at(i, j) = g.at(x0 + i, y0 + j);
    return out;
}

SyntheticPair render_pair(int width, int height, const FlowField& full_flow,
                          const ScalarGrid& texture, int margin) {
    SyntheticPair out;
    const ScalarGrid frame0_full = warp_backward(texture, full_flow).grid;
    out.pair.frame0 = crop(frame0_full, margin, margin, width, height);
    out.pair.frame1 = crop(texture, margin, margin, width, height);
    out.gt = FlowField(crop(full_flow.vx, margin, margin, width, height),
                       crop(full_flow.vy, margin, margin, width, height));
    return out;
}

}  // namespace

ScalarGrid noise_texture(int width, int height, std::uint64_t seed, double sigma, double lo,
                         double hi) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("noise_texture: dimensions must be positive");
    std::mt19937_64 rng(seed);
    ScalarGrid g(width, height);
    for (std::size_t p = 0; p < g.size(); ++p) g[p] = lo + (hi - lo) * unit_double(rng);
    if (sigma > 0.0) {
        const int ksize = std::max(3, 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1);
        g = gaussian_smooth(g, sigma, ksize);
    }
    return g;
}

SyntheticPair make_translation_pair(int width, int height, double dx, double dy,
                                    std::uint64_t seed) {
    const int margin =
        static_cast<int>(std::ceil(std::max(std::fabs(dx), std::fabs(dy)))) + 3;
    const int fw = width + 2 * margin, fh = height + 2 * margin;
    const ScalarGrid texture = noise_texture(fw, fh, seed);
    FlowField flow(fw, fh);
    flow.vx.fill(dx);
    flow.vy.fill(dy);
    return render_pair(width, height, flow, texture, margin);
}

SyntheticPair make_two_region_pair(int width, int height, double left_vx, double right_vx,
                                   std::uint64_t seed) {
    const int margin = static_cast<int>(
                           std::ceil(std::max(std::fabs(left_vx), std::fabs(right_vx)))) +
                       3;
    const int fw = width + 2 * margin, fh = height + 2 * margin;
    const ScalarGrid texture = noise_texture(fw, fh, seed);
    FlowField flow(fw, fh);
    const int seam = margin + width / 2;
    for (int j = 0; j < fh; ++j)
        for (int i = 0; i < fw; ++i) flow.vx.at(i, j) = i < seam ? left_vx : right_vx;
    return render_pair(width, height, flow, texture, margin);
}

ImagePair with_brightness_change(const ImagePair& pair, double gain, double offset) {
    ImagePair out = pair;
    for (double& v : out.frame1.values())
        v = std::clamp((1.0 + gain) * v + offset, 0.0, 1.0);
    return out;
}

}  // namespace hvdflow
