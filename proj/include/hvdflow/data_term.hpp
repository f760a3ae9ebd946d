#pragma once

#include <cstdint>
#include <vector>

#include "hvdflow/grid.hpp"
#include "hvdflow/selection.hpp"

namespace hvdflow {

enum class DataTermKind { OFC, GCA, GDIM };

const char* to_string(DataTermKind kind);

// Intensity derivatives at the current linearization point. frame1 is
// backward-warped by the current flow before differencing; spatial
// derivatives are central differences of the two-frame average.
struct DerivativeStack {
    DataTermKind kind = DataTermKind::OFC;
    int width = 0;
    int height = 0;
    ScalarGrid Ix, Iy, It;
    // Second-order / spatiotemporal grids, populated for GCA only.
    ScalarGrid Ixx, Ixy, Iyx, Iyy, Ixt, Iyt;
    // Reference intensity (warped frame1), populated for GDIM only.
    ScalarGrid I;
    std::vector<std::uint8_t> out_of_bounds;

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
};

DerivativeStack compute_derivatives(const ImagePair& pair, const FlowField& current_flow,
                                    DataTermKind kind);

// Unknowns of one data-term system: always the flow, plus the per-pixel
// contrast multiplier d and brightness offset c for GDIM.
struct Unknowns {
    FlowField flow;
    ScalarGrid d;
    ScalarGrid c;
    bool has_brightness = false;

    static Unknowns zeros(DataTermKind kind, int width, int height);
    int width() const { return flow.width(); }
    int height() const { return flow.height(); }
};

// Masked diagonal-block linear system for one of the three data models.
// Every row couples only the unknowns at its own pixel, so application and
// transposition are O(rows).
struct DataTermSystem {
    DataTermKind kind = DataTermKind::OFC;
    int width = 0;
    int height = 0;
    std::vector<double> coeff_vx, coeff_vy;  // per row
    std::vector<double> coeff_d, coeff_c;    // GDIM only
    std::vector<double> rhs;                 // y (already sign-resolved: residual = A u - y)
    std::vector<std::uint32_t> row_pixel;
    std::vector<std::uint8_t> row_active;    // selection mask and in-bounds flag combined
    double dc_penalty = 0.0;                 // quadratic stabilizer weight on d and c (GDIM)

    std::size_t rows() const { return rhs.size(); }
    std::size_t active_rows() const;
};

DataTermSystem build_ofc(const DerivativeStack& stack, const MeasurementMask& mask);
DataTermSystem build_gca(const DerivativeStack& stack, const MeasurementMask& mask);
DataTermSystem build_gdim(const DerivativeStack& stack, const MeasurementMask& mask,
                          double dc_penalty = 1e-2);

// A u for the linear part (masked rows give 0).
std::vector<double> data_apply(const DataTermSystem& sys, const Unknowns& u);
// A^T r scattered back onto unknown-shaped grids.
Unknowns data_apply_transpose(const DataTermSystem& sys, const std::vector<double>& row_values);

// Sum of Huber norms of the active residuals (plus the d/c stabilizer for GDIM).
double data_energy(const DataTermSystem& sys, const Unknowns& u, double eps);
Unknowns data_gradient(const DataTermSystem& sys, const Unknowns& u, double eps);

}  // namespace hvdflow
