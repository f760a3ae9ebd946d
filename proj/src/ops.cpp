#include "hvdflow/ops.hpp"

namespace hvdflow {

namespace {

inline int clampi(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

StencilOp make_op(std::initializer_list<StencilTap> taps) {
    StencilOp op;
    for (const auto& t : taps) op.taps[op.count++] = t;
    return op;
}

}  // namespace

ScalarGrid apply_stencil(const StencilOp& op, const ScalarGrid& g) {
    const int w = g.width(), h = g.height();
    ScalarGrid out(w, h);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            double acc = 0.0;
            for (int t = 0; t < op.count; ++t) {
                const StencilTap& tap = op.taps[t];
                acc += tap.coeff * g.at(clampi(i + tap.di, w - 1), clampi(j + tap.dj, h - 1));
            }
            out.at(i, j) = acc;
        }
    }
    return out;
}

ScalarGrid apply_stencil_adjoint(const StencilOp& op, const ScalarGrid& g) {
    const int w = g.width(), h = g.height();
    ScalarGrid out(w, h, 0.0);
    // Scatter form: transposes the gather above tap by tap.
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            const double v = g.at(i, j);
            for (int t = 0; t < op.count; ++t) {
                const StencilTap& tap = op.taps[t];
                out.at(clampi(i + tap.di, w - 1), clampi(j + tap.dj, h - 1)) += tap.coeff * v;
            }
        }
    }
    return out;
}

const StencilOp& stencil_diff_x() {
    static const StencilOp op = make_op({{1, 0, 1.0}, {0, 0, -1.0}});
    return op;
}

const StencilOp& stencil_diff_y() {
    static const StencilOp op = make_op({{0, 1, 1.0}, {0, 0, -1.0}});
    return op;
}

const StencilOp& stencil_diff_xy() {
    // dx(i,j) - dy(i+1,j) with each difference clamped at its own edge.
    static const StencilOp op = make_op({{1, 0, 2.0}, {0, 0, -1.0}, {1, 1, -1.0}});
    return op;
}

const StencilOp& stencil_diff_yx(DiagonalVariant variant) {
    // dy(i,j) - dx(i,j+1); the same_pixel form is the printed dy(i,j) - dx(i,j).
    static const StencilOp mirrored = make_op({{0, 1, 2.0}, {0, 0, -1.0}, {1, 1, -1.0}});
    static const StencilOp same_pixel = make_op({{0, 1, 1.0}, {1, 0, -1.0}});
    return variant == DiagonalVariant::mirrored ? mirrored : same_pixel;
}

ScalarGrid forward_diff_x(const ScalarGrid& g) { return apply_stencil(stencil_diff_x(), g); }
ScalarGrid forward_diff_y(const ScalarGrid& g) { return apply_stencil(stencil_diff_y(), g); }
ScalarGrid adjoint_diff_x(const ScalarGrid& g) { return apply_stencil_adjoint(stencil_diff_x(), g); }
ScalarGrid adjoint_diff_y(const ScalarGrid& g) { return apply_stencil_adjoint(stencil_diff_y(), g); }

ScalarGrid diff_xy(const ScalarGrid& g) { return apply_stencil(stencil_diff_xy(), g); }
ScalarGrid diff_yx(const ScalarGrid& g, DiagonalVariant variant) {
    return apply_stencil(stencil_diff_yx(variant), g);
}

ScalarGrid second_diff_xx(const ScalarGrid& g) { return forward_diff_y(forward_diff_x(g)); }
ScalarGrid second_diff_yy(const ScalarGrid& g) { return forward_diff_x(forward_diff_y(g)); }

ScalarGrid central_diff_x(const ScalarGrid& g) {
    const int w = g.width(), h = g.height();
    ScalarGrid out(w, h);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i)
            out.at(i, j) = 0.5 * (g.at(clampi(i + 1, w - 1), j) - g.at(clampi(i - 1, w - 1), j));
    return out;
}

ScalarGrid central_diff_y(const ScalarGrid& g) {
    const int w = g.width(), h = g.height();
    ScalarGrid out(w, h);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i)
            out.at(i, j) = 0.5 * (g.at(i, clampi(j + 1, h - 1)) - g.at(i, clampi(j - 1, h - 1)));
    return out;
}

}  // namespace hvdflow
