#pragma once

#include <array>
#include <string>
#include <vector>

#include "hvdflow/grid.hpp"
#include "hvdflow/ops.hpp"

namespace hvdflow {

// Ground-truth pixels whose components exceed this magnitude mark unknown
// flow (the .flo sentinel convention) and are excluded from metrics.
inline constexpr double kUnknownFlowThreshold = 1e9;

inline bool flow_pixel_known(const FlowField& v, std::size_t p) {
    return std::fabs(v.vx[p]) <= kUnknownFlowThreshold &&
           std::fabs(v.vy[p]) <= kUnknownFlowThreshold;
}

// Mean endpoint error over pixels with known ground truth.
double mepe(const FlowField& v, const FlowField& v_gt);

// 256-bin between-class-variance threshold over [min, max] of the grid.
// A constant grid returns the constant itself.
double otsu_threshold(const ScalarGrid& g);
// Same, restricted to pixels with mask != 0 (mask may be empty for all).
double otsu_threshold(const ScalarGrid& g, const std::vector<std::uint8_t>& mask);

struct MapSparsity {
    std::string name;
    double otsu = 0.0;
    double nonzero_fraction = 0.0;
};

struct SparsityReport {
    // Channel-coupled magnitude maps: dx, dy, dxy, dyx, and the full gradient.
    std::array<MapSparsity, 5> coupled;
    // Per-channel partial maps (|D vx|, |D vy| for each operator).
    std::vector<MapSparsity> per_channel;
    bool partials_sparser_than_gradient = false;
};

// Binarizes the derivative-magnitude maps of a ground-truth flow with per-map
// Otsu thresholds and reports nonzero fractions.
SparsityReport sparsity_report(const FlowField& v_gt,
                               DiagonalVariant variant = DiagonalVariant::mirrored);

// Binarized map (value > per-map Otsu threshold), for PNG emission.
std::vector<std::uint8_t> binarize_with_otsu(const ScalarGrid& g);

}  // namespace hvdflow
