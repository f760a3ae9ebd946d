#pragma once

#include <array>
#include <cstddef>

#include "hvdflow/grid.hpp"

namespace hvdflow {

// A small clamped-tap stencil: out(i,j) = sum_t coeff_t * g(clamp(i+di_t), clamp(j+dj_t)).
// Every derivative operator below is expressed this way so that its exact
// transpose is available by scattering the same taps.
struct StencilTap {
    int di;
    int dj;
    double coeff;
};

struct StencilOp {
    std::array<StencilTap, 4> taps{};
    int count = 0;
};

ScalarGrid apply_stencil(const StencilOp& op, const ScalarGrid& g);
ScalarGrid apply_stencil_adjoint(const StencilOp& op, const ScalarGrid& g);

// Which discretization the 135-degree continuity difference uses.
// `mirrored` compares dy at (i,j) against dx one row down, the same 2x2-cell
// pairing as the 45-degree term; `same_pixel` compares both at (i,j).
enum class DiagonalVariant { mirrored, same_pixel };

// Forward differences with replicate boundary (zero along the trailing edge).
const StencilOp& stencil_diff_x();
const StencilOp& stencil_diff_y();
// 45-degree continuity difference: dx(i,j) - dy(i+1,j).
const StencilOp& stencil_diff_xy();
// 135-degree continuity difference, per variant.
const StencilOp& stencil_diff_yx(DiagonalVariant variant = DiagonalVariant::mirrored);

ScalarGrid forward_diff_x(const ScalarGrid& g);
ScalarGrid forward_diff_y(const ScalarGrid& g);
ScalarGrid adjoint_diff_x(const ScalarGrid& g);
ScalarGrid adjoint_diff_y(const ScalarGrid& g);

ScalarGrid diff_xy(const ScalarGrid& g);
ScalarGrid diff_yx(const ScalarGrid& g, DiagonalVariant variant = DiagonalVariant::mirrored);

// Second differences of the first differences. They coincide (the cross
// difference of the 2x2 cell) and are kept only as separate composition
// orders so that identity can be verified.
ScalarGrid second_diff_xx(const ScalarGrid& g);
ScalarGrid second_diff_yy(const ScalarGrid& g);

// 3-point central differences with replicate boundary, used for image
// intensity derivatives (not for the regularizer operators).
ScalarGrid central_diff_x(const ScalarGrid& g);
ScalarGrid central_diff_y(const ScalarGrid& g);

}  // namespace hvdflow
