#include "hvdflow/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hvdflow {

namespace {

inline int clampi(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

inline double clampd(double v, double lo, double hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

// Horizontal pass of a separable kernel, replicate boundary.
ScalarGrid convolve_x(const ScalarGrid& g, const std::vector<double>& k) {
    const int w = g.width(), h = g.height();
    const int r = static_cast<int>(k.size()) / 2;
    ScalarGrid out(w, h);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            double acc = 0.0;
            for (int t = -r; t <= r; ++t) acc += k[t + r] * g.at(clampi(i + t, w - 1), j);
            out.at(i, j) = acc;
        }
    }
    return out;
}

ScalarGrid convolve_y(const ScalarGrid& g, const std::vector<double>& k) {
    const int w = g.width(), h = g.height();
    const int r = static_cast<int>(k.size()) / 2;
    ScalarGrid out(w, h);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            double acc = 0.0;
            for (int t = -r; t <= r; ++t) acc += k[t + r] * g.at(i, clampi(j + t, h - 1));
            out.at(i, j) = acc;
        }
    }
    return out;
}

inline double bilinear_sample(const ScalarGrid& g, double x, double y) {
    const int w = g.width(), h = g.height();
    x = clampd(x, 0.0, w - 1.0);
    y = clampd(y, 0.0, h - 1.0);
    const int x0 = std::min(static_cast<int>(std::floor(x)), w - 1);
    const int y0 = std::min(static_cast<int>(std::floor(y)), h - 1);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * g.at(x0, y0) + fx * g.at(x1, y0);
    const double bot = (1.0 - fx) * g.at(x0, y1) + fx * g.at(x1, y1);
    return (1.0 - fy) * top + fy * bot;
}

}  // namespace

std::vector<double> gaussian_kernel_1d(double sigma, int size) {
    if (sigma <= 0.0) throw std::invalid_argument("gaussian_kernel_1d: sigma must be positive");
    if (size < 1 || size % 2 == 0)
        throw std::invalid_argument("gaussian_kernel_1d: size must be odd and >= 1");
    const int r = size / 2;
    std::vector<double> k(size);
    double sum = 0.0;
    for (int t = -r; t <= r; ++t) {
        const double v = std::exp(-0.5 * (t * t) / (sigma * sigma));
        k[t + r] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

ScalarGrid gaussian_smooth(const ScalarGrid& g, double sigma, int size) {
    const std::vector<double> k = gaussian_kernel_1d(sigma, size);
    // Separable passes compose to the full 2-D clamped convolution because
    // the two coordinates clamp independently.
    return convolve_y(convolve_x(g, k), k);
}

ScalarGrid resample_bilinear(const ScalarGrid& g, int new_w, int new_h) {
    if (new_w < 1 || new_h < 1)
        throw std::invalid_argument("resample_bilinear: target dimensions must be >= 1");
    if (new_w == g.width() && new_h == g.height()) return g;
    ScalarGrid out(new_w, new_h);
    const double sx = static_cast<double>(g.width()) / new_w;
    const double sy = static_cast<double>(g.height()) / new_h;
    for (int j = 0; j < new_h; ++j) {
        const double y = (j + 0.5) * sy - 0.5;
        for (int i = 0; i < new_w; ++i) {
            const double x = (i + 0.5) * sx - 0.5;
            out.at(i, j) = bilinear_sample(g, x, y);
        }
    }
    return out;
}

WarpResult warp_backward(const ScalarGrid& g, const FlowField& flow) {
    if (!g.same_size(flow.vx))
        throw std::invalid_argument("warp_backward: flow dimensions must match the grid");
    const int w = g.width(), h = g.height();
    WarpResult res{ScalarGrid(w, h), std::vector<std::uint8_t>(g.size(), 0)};
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            const double x = i + flow.vx.at(i, j);
            const double y = j + flow.vy.at(i, j);
            if (x < 0.0 || x > w - 1.0 || y < 0.0 || y > h - 1.0)
                res.out_of_bounds[static_cast<std::size_t>(j) * w + i] = 1;
            res.grid.at(i, j) = bilinear_sample(g, x, y);
        }
    }
    return res;
}

}  // namespace hvdflow
