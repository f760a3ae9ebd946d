#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hvdflow {

// 2-D single-channel field stored row-major: element (i, j) sits at
// values[j * width + i]. i indexes columns (horizontal axis), j rows.
class ScalarGrid {
public:
    ScalarGrid() = default;
    ScalarGrid(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          values_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("ScalarGrid: dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double& at(int i, int j) {
        assert(i >= 0 && i < width_ && j >= 0 && j < height_);
        return values_[static_cast<std::size_t>(j) * width_ + i];
    }
    double at(int i, int j) const {
        assert(i >= 0 && i < width_ && j >= 0 && j < height_);
        return values_[static_cast<std::size_t>(j) * width_ + i];
    }

    // Replicate (clamp-to-edge) access for stencil boundaries.
    double at_clamped(int i, int j) const {
        if (i < 0) i = 0;
        if (i >= width_) i = width_ - 1;
        if (j < 0) j = 0;
        if (j >= height_) j = height_ - 1;
        return values_[static_cast<std::size_t>(j) * width_ + i];
    }

    double& operator[](std::size_t idx) { return values_[idx]; }
    double operator[](std::size_t idx) const { return values_[idx]; }

    std::vector<double>& values() & { return values_; }
    const std::vector<double>& values() const& { return values_; }
    // Calling on a temporary hands the storage over instead of dangling.
    std::vector<double> values() && { return std::move(values_); }

    void fill(double v) { values_.assign(values_.size(), v); }

    bool same_size(const ScalarGrid& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

// Optical flow field in pixels/frame; vx is the horizontal component.
struct FlowField {
    ScalarGrid vx;
    ScalarGrid vy;

    FlowField() = default;
    FlowField(int width, int height) : vx(width, height), vy(width, height) {}
    FlowField(ScalarGrid x, ScalarGrid y) : vx(std::move(x)), vy(std::move(y)) {
        if (!vx.same_size(vy))
            throw std::invalid_argument("FlowField: component dimensions differ");
    }

    int width() const { return vx.width(); }
    int height() const { return vx.height(); }
};

// Two consecutive intensity frames, frame0 earlier in time.
struct ImagePair {
    ScalarGrid frame0;
    ScalarGrid frame1;

    int width() const { return frame0.width(); }
    int height() const { return frame0.height(); }
};

inline bool all_finite(const ScalarGrid& g) {
    for (double v : g.values())
        if (!std::isfinite(v)) return false;
    return true;
}

inline bool all_finite(const FlowField& v) { return all_finite(v.vx) && all_finite(v.vy); }

inline double grid_mean(const ScalarGrid& g) {
    double s = 0.0;
    for (double v : g.values()) s += v;
    return g.size() ? s / static_cast<double>(g.size()) : 0.0;
}

inline void validate_image_pair(const ImagePair& pair) {
    if (pair.frame0.empty() || pair.frame1.empty())
        throw std::invalid_argument("ImagePair: empty frame");
    if (!pair.frame0.same_size(pair.frame1))
        throw std::invalid_argument("ImagePair: frame dimensions differ");
    for (const ScalarGrid* g : {&pair.frame0, &pair.frame1}) {
        for (double v : g->values()) {
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw std::invalid_argument("ImagePair: intensities must be finite and in [0,1]");
        }
    }
}

}  // namespace hvdflow
