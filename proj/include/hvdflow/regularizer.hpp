#pragma once

#include "hvdflow/grid.hpp"
#include "hvdflow/ops.hpp"

namespace hvdflow {

// Per-pixel weights in (0,1]; an empty grid means uniform 1.
struct RegularizerWeights {
    ScalarGrid w;

    bool uniform() const { return w.empty(); }
    static RegularizerWeights none() { return {}; }
};

// w = exp(-alpha * |grad I|^beta) from the forward-difference gradient
// magnitude of the reference frame.
RegularizerWeights adaptive_weights(const ScalarGrid& frame, double alpha, double beta);

// Sum over the four difference operators (dx, dy, dxy, dyx) of the Huber norm
// of the channel-coupled response magnitude sqrt((D vx)^2 + (D vy)^2),
// optionally weighted per pixel.
double hvd_energy(const FlowField& v, double eps, const RegularizerWeights& weights,
                  DiagonalVariant variant = DiagonalVariant::mirrored);

// Exact gradient of hvd_energy.
FlowField hvd_gradient(const FlowField& v, double eps, const RegularizerWeights& weights,
                       DiagonalVariant variant = DiagonalVariant::mirrored);

enum class TvVariant { isotropic, anisotropic, weighted_anisotropic };

// Huber-smoothed total-variation baselines over both flow channels. The
// weighted variant requires weights; the others ignore them.
double tv_energy(const FlowField& v, double eps, TvVariant variant,
                 const RegularizerWeights& weights = {});
FlowField tv_gradient(const FlowField& v, double eps, TvVariant variant,
                      const RegularizerWeights& weights = {});

}  // namespace hvdflow
