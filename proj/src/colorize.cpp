#include "hvdflow/colorize.hpp"

#include <algorithm>
#include <cmath>

#include "hvdflow/evaluation.hpp"

namespace hvdflow {

const std::vector<std::array<double, 3>>& flow_color_wheel() {
    static const std::vector<std::array<double, 3>> wheel = [] {
        const int RY = 15, YG = 6, GC = 4, CB = 11, BM = 13, MR = 6;
        std::vector<std::array<double, 3>> w;
        w.reserve(RY + YG + GC + CB + BM + MR);
        for (int i = 0; i < RY; ++i) w.push_back({1.0, static_cast<double>(i) / RY, 0.0});
        for (int i = 0; i < YG; ++i) w.push_back({1.0 - static_cast<double>(i) / YG, 1.0, 0.0});
        for (int i = 0; i < GC; ++i) w.push_back({0.0, 1.0, static_cast<double>(i) / GC});
        for (int i = 0; i < CB; ++i) w.push_back({0.0, 1.0 - static_cast<double>(i) / CB, 1.0});
        for (int i = 0; i < BM; ++i) w.push_back({static_cast<double>(i) / BM, 0.0, 1.0});
        for (int i = 0; i < MR; ++i) w.push_back({1.0, 0.0, 1.0 - static_cast<double>(i) / MR});
        return w;
    }();
    return wheel;
}

std::array<std::uint8_t, 3> flow_color(double fx, double fy, double max_mag) {
    const auto& wheel = flow_color_wheel();
    const int ncols = static_cast<int>(wheel.size());

    double rad = std::sqrt(fx * fx + fy * fy) / max_mag;
    rad = std::min(rad, 1.0);
    const double a = std::atan2(-fy, -fx) / M_PI;        // in [-1, 1]
    const double fk = (a + 1.0) / 2.0 * (ncols - 1);
    const int k0 = std::min(static_cast<int>(fk), ncols - 1);
    const int k1 = (k0 + 1) % ncols;
    const double f = fk - k0;

    std::array<std::uint8_t, 3> out{};
    for (int b = 0; b < 3; ++b) {
        double col = (1.0 - f) * wheel[k0][b] + f * wheel[k1][b];
        col = 1.0 - rad * (1.0 - col);  // fade toward white as magnitude drops
        out[b] = static_cast<std::uint8_t>(std::lround(255.0 * col));
    }
    return out;
}

RgbImage colorize_flow(const FlowField& v, double max_mag) {
    if (max_mag <= 0.0) {
        std::vector<double> mags;
        mags.reserve(v.vx.size());
        for (std::size_t p = 0; p < v.vx.size(); ++p) {
            if (!flow_pixel_known(v, p)) continue;
            mags.push_back(std::sqrt(v.vx[p] * v.vx[p] + v.vy[p] * v.vy[p]));
        }
        if (mags.empty()) {
            max_mag = 1.0;
        } else {
            const std::size_t idx =
                static_cast<std::size_t>(0.99 * static_cast<double>(mags.size() - 1));
            std::nth_element(mags.begin(), mags.begin() + idx, mags.end());
            max_mag = mags[idx];
            if (max_mag <= 0.0) max_mag = 1.0;
        }
    }

    RgbImage img(v.width(), v.height());
    for (std::size_t p = 0; p < v.vx.size(); ++p) {
        std::array<std::uint8_t, 3> rgb{0, 0, 0};  // unknown flow renders black
        if (flow_pixel_known(v, p)) rgb = flow_color(v.vx[p], v.vy[p], max_mag);
        img.pixels[3 * p] = rgb[0];
        img.pixels[3 * p + 1] = rgb[1];
        img.pixels[3 * p + 2] = rgb[2];
    }
    return img;
}

}  // namespace hvdflow
