#include "hvdflow/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hvdflow/huber.hpp"

namespace hvdflow {

namespace {

void check_weights(const RegularizerWeights& weights, const FlowField& v) {
    if (!weights.uniform() && !weights.w.same_size(v.vx))
        throw std::invalid_argument("regularizer: weight dimensions differ from flow");
}

void fill_ops(const StencilOp* (&ops)[4], DiagonalVariant variant) {
    ops[0] = &stencil_diff_x();
    ops[1] = &stencil_diff_y();
    ops[2] = &stencil_diff_xy();
    ops[3] = &stencil_diff_yx(variant);
}

}  // namespace

RegularizerWeights adaptive_weights(const ScalarGrid& frame, double alpha, double beta) {
    if (alpha <= 0.0 || beta <= 0.0)
        throw std::invalid_argument("adaptive_weights: alpha and beta must be positive");
    const ScalarGrid gx = forward_diff_x(frame);
    const ScalarGrid gy = forward_diff_y(frame);
    RegularizerWeights out;
    out.w = ScalarGrid(frame.width(), frame.height());
    for (std::size_t p = 0; p < frame.size(); ++p) {
        const double mag = std::sqrt(gx[p] * gx[p] + gy[p] * gy[p]);
        out.w[p] = std::exp(-alpha * std::pow(mag, beta));
    }
    return out;
}

double hvd_energy(const FlowField& v, double eps, const RegularizerWeights& weights,
                  DiagonalVariant variant) {
    check_weights(weights, v);
    const StencilOp* ops[4];
    fill_ops(ops, variant);
    double energy = 0.0;
    for (const StencilOp* op : ops) {
        const ScalarGrid ax = apply_stencil(*op, v.vx);
        const ScalarGrid ay = apply_stencil(*op, v.vy);
        for (std::size_t p = 0; p < ax.size(); ++p) {
            const double mag = std::sqrt(ax[p] * ax[p] + ay[p] * ay[p]);
            const double w = weights.uniform() ? 1.0 : weights.w[p];
            energy += w * huber_value(mag, eps);
        }
    }
    return energy;
}

FlowField hvd_gradient(const FlowField& v, double eps, const RegularizerWeights& weights,
                       DiagonalVariant variant) {
    check_weights(weights, v);
    const StencilOp* ops[4];
    fill_ops(ops, variant);
    FlowField grad(v.width(), v.height());
    for (const StencilOp* op : ops) {
        ScalarGrid ax = apply_stencil(*op, v.vx);
        ScalarGrid ay = apply_stencil(*op, v.vy);
        // Normalize each response by max(eps, coupled magnitude), then pull
        // back through the transposed operator.
        for (std::size_t p = 0; p < ax.size(); ++p) {
            const double mag = std::sqrt(ax[p] * ax[p] + ay[p] * ay[p]);
            const double w = weights.uniform() ? 1.0 : weights.w[p];
            const double s = w / std::max(eps, mag);
            ax[p] *= s;
            ay[p] *= s;
        }
        const ScalarGrid gx = apply_stencil_adjoint(*op, ax);
        const ScalarGrid gy = apply_stencil_adjoint(*op, ay);
        for (std::size_t p = 0; p < gx.size(); ++p) {
            grad.vx[p] += gx[p];
            grad.vy[p] += gy[p];
        }
    }
    return grad;
}

double tv_energy(const FlowField& v, double eps, TvVariant variant,
                 const RegularizerWeights& weights) {
    check_weights(weights, v);
    if (variant == TvVariant::weighted_anisotropic && weights.uniform())
        throw std::invalid_argument("tv_energy: weighted variant requires weights");
    const ScalarGrid* channels[2] = {&v.vx, &v.vy};
    double energy = 0.0;
    for (const ScalarGrid* ch : channels) {
        const ScalarGrid gx = forward_diff_x(*ch);
        const ScalarGrid gy = forward_diff_y(*ch);
        for (std::size_t p = 0; p < gx.size(); ++p) {
            if (variant == TvVariant::isotropic) {
                energy += huber_value(std::sqrt(gx[p] * gx[p] + gy[p] * gy[p]), eps);
            } else {
                const double w =
                    variant == TvVariant::weighted_anisotropic ? weights.w[p] : 1.0;
                energy += w * (huber_value(gx[p], eps) + huber_value(gy[p], eps));
            }
        }
    }
    return energy;
}

FlowField tv_gradient(const FlowField& v, double eps, TvVariant variant,
                      const RegularizerWeights& weights) {
    check_weights(weights, v);
    if (variant == TvVariant::weighted_anisotropic && weights.uniform())
        throw std::invalid_argument("tv_gradient: weighted variant requires weights");
    FlowField grad(v.width(), v.height());
    ScalarGrid* outs[2] = {&grad.vx, &grad.vy};
    const ScalarGrid* channels[2] = {&v.vx, &v.vy};
    for (int c = 0; c < 2; ++c) {
        ScalarGrid gx = forward_diff_x(*channels[c]);
        ScalarGrid gy = forward_diff_y(*channels[c]);
        for (std::size_t p = 0; p < gx.size(); ++p) {
            if (variant == TvVariant::isotropic) {
                const double s = 1.0 / std::max(eps, std::sqrt(gx[p] * gx[p] + gy[p] * gy[p]));
                gx[p] *= s;
                gy[p] *= s;
            } else {
                const double w =
                    variant == TvVariant::weighted_anisotropic ? weights.w[p] : 1.0;
                gx[p] = w * huber_deriv(gx[p], eps);
                gy[p] = w * huber_deriv(gy[p], eps);
            }
        }
        const ScalarGrid bx = adjoint_diff_x(gx);
        const ScalarGrid by = adjoint_diff_y(gy);
        for (std::size_t p = 0; p < bx.size(); ++p) (*outs[c])[p] = bx[p] + by[p];
    }
    return grad;
}

}  // namespace hvdflow
