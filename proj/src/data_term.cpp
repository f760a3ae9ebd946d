#include "hvdflow/data_term.hpp"

#include <cmath>
#include <stdexcept>

#include "hvdflow/filters.hpp"
#include "hvdflow/huber.hpp"
#include "hvdflow/ops.hpp"

namespace hvdflow {

const char* to_string(DataTermKind kind) {
    switch (kind) {
        case DataTermKind::OFC: return "ofc";
        case DataTermKind::GCA: return "gca";
        case DataTermKind::GDIM: return "gdim";
    }
    return "?";
}

DerivativeStack compute_derivatives(const ImagePair& pair, const FlowField& current_flow,
                                    DataTermKind kind) {
    if (!pair.frame0.same_size(pair.frame1))
        throw std::invalid_argument("compute_derivatives: frame dimensions differ");
    if (!pair.frame0.same_size(current_flow.vx))
        throw std::invalid_argument("compute_derivatives: flow dimensions differ from frames");

    DerivativeStack st;
    st.kind = kind;
    st.width = pair.width();
    st.height = pair.height();

    WarpResult warped = warp_backward(pair.frame1, current_flow);
    st.out_of_bounds = std::move(warped.out_of_bounds);

    // Symmetric spatial derivatives from the two-frame average; temporal
    // derivative from the frame difference at the linearization point.
    ScalarGrid avg(st.width, st.height);
    for (std::size_t p = 0; p < avg.size(); ++p)
        avg[p] = 0.5 * (pair.frame0[p] + warped.grid[p]);
    st.Ix = central_diff_x(avg);
    st.Iy = central_diff_y(avg);
    st.It = ScalarGrid(st.width, st.height);
    for (std::size_t p = 0; p < st.It.size(); ++p)
        st.It[p] = warped.grid[p] - pair.frame0[p];

    if (kind == DataTermKind::GCA) {
        st.Ixx = central_diff_x(st.Ix);
        st.Ixy = central_diff_y(st.Ix);
        st.Iyx = central_diff_x(st.Iy);
        st.Iyy = central_diff_y(st.Iy);
        st.Ixt = central_diff_x(st.It);
        st.Iyt = central_diff_y(st.It);
    } else if (kind == DataTermKind::GDIM) {
        st.I = std::move(warped.grid);
    }
    return st;
}

Unknowns Unknowns::zeros(DataTermKind kind, int width, int height) {
    Unknowns u;
    u.flow = FlowField(width, height);
    if (kind == DataTermKind::GDIM) {
        u.d = ScalarGrid(width, height);
        u.c = ScalarGrid(width, height);
        u.has_brightness = true;
    }
    return u;
}

std::size_t DataTermSystem::active_rows() const {
    std::size_t n = 0;
    for (std::uint8_t a : row_active) n += a;
    return n;
}

namespace {

void check_mask(const DerivativeStack& stack, const MeasurementMask& mask) {
    if (mask.selected.size() != stack.pixel_count())
        throw std::invalid_argument("data term: mask size differs from pixel count");
}

}  // namespace

DataTermSystem build_ofc(const DerivativeStack& stack, const MeasurementMask& mask) {
    check_mask(stack, mask);
    const std::size_t n = stack.pixel_count();
    DataTermSystem sys;
    sys.kind = DataTermKind::OFC;
    sys.width = stack.width;
    sys.height = stack.height;
    sys.coeff_vx.resize(n);
    sys.coeff_vy.resize(n);
    sys.rhs.resize(n);
    sys.row_pixel.resize(n);
    sys.row_active.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        sys.coeff_vx[p] = stack.Ix[p];
        sys.coeff_vy[p] = stack.Iy[p];
        sys.rhs[p] = -stack.It[p];
        sys.row_pixel[p] = static_cast<std::uint32_t>(p);
        sys.row_active[p] = mask.selected[p] && !stack.out_of_bounds[p];
    }
    return sys;
}

DataTermSystem build_gca(const DerivativeStack& stack, const MeasurementMask& mask) {
    check_mask(stack, mask);
    if (stack.Ixx.empty() || stack.Iyy.empty())
        throw std::invalid_argument("build_gca: stack lacks second-order derivatives");
    const std::size_t n = stack.pixel_count();
    DataTermSystem sys;
    sys.kind = DataTermKind::GCA;
    sys.width = stack.width;
    sys.height = stack.height;
    sys.coeff_vx.resize(2 * n);
    sys.coeff_vy.resize(2 * n);
    sys.rhs.resize(2 * n);
    sys.row_pixel.resize(2 * n);
    sys.row_active.resize(2 * n);
    for (std::size_t p = 0; p < n; ++p) {
        const std::uint8_t active = mask.selected[p] && !stack.out_of_bounds[p];
        sys.coeff_vx[2 * p] = stack.Ixx[p];
        sys.coeff_vy[2 * p] = stack.Ixy[p];
        sys.rhs[2 * p] = -stack.Ixt[p];
        sys.coeff_vx[2 * p + 1] = stack.Iyx[p];
        sys.coeff_vy[2 * p + 1] = stack.Iyy[p];
        sys.rhs[2 * p + 1] = -stack.Iyt[p];
        sys.row_pixel[2 * p] = sys.row_pixel[2 * p + 1] = static_cast<std::uint32_t>(p);
        sys.row_active[2 * p] = sys.row_active[2 * p + 1] = active;
    }
    return sys;
}

DataTermSystem build_gdim(const DerivativeStack& stack, const MeasurementMask& mask,
                          double dc_penalty) {
    check_mask(stack, mask);
    if (stack.I.empty())
        throw std::invalid_argument("build_gdim: stack lacks the reference intensity");
    const std::size_t n = stack.pixel_count();
    DataTermSystem sys;
    sys.kind = DataTermKind::GDIM;
    sys.width = stack.width;
    sys.height = stack.height;
    sys.dc_penalty = dc_penalty;
    sys.coeff_vx.resize(n);
    sys.coeff_vy.resize(n);
    sys.coeff_d.resize(n);
    sys.coeff_c.resize(n);
    sys.rhs.resize(n);
    sys.row_pixel.resize(n);
    sys.row_active.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        sys.coeff_vx[p] = stack.Ix[p];
        sys.coeff_vy[p] = stack.Iy[p];
        sys.coeff_d[p] = -stack.I[p];
        sys.coeff_c[p] = -1.0;
        sys.rhs[p] = -stack.It[p];
        sys.row_pixel[p] = static_cast<std::uint32_t>(p);
        sys.row_active[p] = mask.selected[p] && !stack.out_of_bounds[p];
    }
    return sys;
}

namespace {

void check_unknowns(const DataTermSystem& sys, const Unknowns& u) {
    if (u.width() != sys.width || u.height() != sys.height)
        throw std::invalid_argument("data term: unknown dimensions differ from system");
    if ((sys.kind == DataTermKind::GDIM) != u.has_brightness)
        throw std::invalid_argument("data term: unknown shape does not match system kind");
}

}  // namespace

std::vector<double> data_apply(const DataTermSystem& sys, const Unknowns& u) {
    check_unknowns(sys, u);
    std::vector<double> out(sys.rows(), 0.0);
    for (std::size_t r = 0; r < sys.rows(); ++r) {
        if (!sys.row_active[r]) continue;
        const std::uint32_t p = sys.row_pixel[r];
        double v = sys.coeff_vx[r] * u.flow.vx[p] + sys.coeff_vy[r] * u.flow.vy[p];
        if (sys.kind == DataTermKind::GDIM)
            v += sys.coeff_d[r] * u.d[p] + sys.coeff_c[r] * u.c[p];
        out[r] = v;
    }
    return out;
}

Unknowns data_apply_transpose(const DataTermSystem& sys, const std::vector<double>& row_values) {
    if (row_values.size() != sys.rows())
        throw std::invalid_argument("data_apply_transpose: row vector size mismatch");
    Unknowns out = Unknowns::zeros(sys.kind, sys.width, sys.height);
    for (std::size_t r = 0; r < sys.rows(); ++r) {
        if (!sys.row_active[r]) continue;
        const std::uint32_t p = sys.row_pixel[r];
        const double v = row_values[r];
        out.flow.vx[p] += sys.coeff_vx[r] * v;
        out.flow.vy[p] += sys.coeff_vy[r] * v;
        if (sys.kind == DataTermKind::GDIM) {
            out.d[p] += sys.coeff_d[r] * v;
            out.c[p] += sys.coeff_c[r] * v;
        }
    }
    return out;
}

double data_energy(const DataTermSystem& sys, const Unknowns& u, double eps) {
    check_unknowns(sys, u);
    double energy = 0.0;
    for (std::size_t r = 0; r < sys.rows(); ++r) {
        if (!sys.row_active[r]) continue;
        const std::uint32_t p = sys.row_pixel[r];
        double residual = sys.coeff_vx[r] * u.flow.vx[p] + sys.coeff_vy[r] * u.flow.vy[p];
        if (sys.kind == DataTermKind::GDIM)
            residual += sys.coeff_d[r] * u.d[p] + sys.coeff_c[r] * u.c[p];
        residual -= sys.rhs[r];
        energy += huber_value(residual, eps);
    }
    if (sys.kind == DataTermKind::GDIM && sys.dc_penalty > 0.0) {
        double q = 0.0;
        for (std::size_t p = 0; p < u.d.size(); ++p) q += u.d[p] * u.d[p] + u.c[p] * u.c[p];
        energy += sys.dc_penalty * q;
    }
    return energy;
}

Unknowns data_gradient(const DataTermSystem& sys, const Unknowns& u, double eps) {
    check_unknowns(sys, u);
    Unknowns grad = Unknowns::zeros(sys.kind, sys.width, sys.height);
    for (std::size_t r = 0; r < sys.rows(); ++r) {
        if (!sys.row_active[r]) continue;
        const std::uint32_t p = sys.row_pixel[r];
        double residual = sys.coeff_vx[r] * u.flow.vx[p] + sys.coeff_vy[r] * u.flow.vy[p];
        if (sys.kind == DataTermKind::GDIM)
            residual += sys.coeff_d[r] * u.d[p] + sys.coeff_c[r] * u.c[p];
        residual -= sys.rhs[r];
        const double s = huber_deriv(residual, eps);
        grad.flow.vx[p] += sys.coeff_vx[r] * s;
        grad.flow.vy[p] += sys.coeff_vy[r] * s;
        if (sys.kind == DataTermKind::GDIM) {
            grad.d[p] += sys.coeff_d[r] * s;
            grad.c[p] += sys.coeff_c[r] * s;
        }
    }
    if (sys.kind == DataTermKind::GDIM && sys.dc_penalty > 0.0) {
        for (std::size_t p = 0; p < grad.d.size(); ++p) {
            grad.d[p] += 2.0 * sys.dc_penalty * u.d[p];
            grad.c[p] += 2.0 * sys.dc_penalty * u.c[p];
        }
    }
    return grad;
}

}  // namespace hvdflow
