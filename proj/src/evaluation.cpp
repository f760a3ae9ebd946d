#include "hvdflow/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hvdflow {

double mepe(const FlowField& v, const FlowField& v_gt) {
    if (!v.vx.same_size(v_gt.vx))
        throw std::invalid_argument("mepe: flow dimensions differ");
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t p = 0; p < v.vx.size(); ++p) {
        if (!flow_pixel_known(v_gt, p)) continue;
        const double dx = v.vx[p] - v_gt.vx[p];
        const double dy = v.vy[p] - v_gt.vy[p];
        sum += std::sqrt(dx * dx + dy * dy);
        ++counted;
    }
    return counted ? sum / static_cast<double>(counted) : 0.0;
}

double otsu_threshold(const ScalarGrid& g) {
    return otsu_threshold(g, std::vector<std::uint8_t>());
}

double otsu_threshold(const ScalarGrid& g, const std::vector<std::uint8_t>& mask) {
    if (g.empty()) throw std::invalid_argument("otsu_threshold: empty grid");
    if (!mask.empty() && mask.size() != g.size())
        throw std::invalid_argument("otsu_threshold: mask size mismatch");

    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!mask.empty() && !mask[p]) continue;
        if (!std::isfinite(g[p])) throw std::invalid_argument("otsu_threshold: non-finite value");
        if (first) {
            lo = hi = g[p];
            first = false;
        } else {
            lo = std::min(lo, g[p]);
            hi = std::max(hi, g[p]);
        }
    }
    if (first || lo == hi) return lo;  // degenerate: constant over the counted pixels

    constexpr int kBins = 256;
    const double width = (hi - lo) / kBins;
    std::array<std::size_t, kBins> hist{};
    std::size_t total = 0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!mask.empty() && !mask[p]) continue;
        int b = static_cast<int>((g[p] - lo) / width);
        b = std::clamp(b, 0, kBins - 1);
        ++hist[b];
        ++total;
    }

    // Maximize between-class variance; strictly-greater keeps the lowest
    // maximizing split.
    double total_mean = 0.0;
    for (int b = 0; b < kBins; ++b) total_mean += static_cast<double>(hist[b]) * b;
    total_mean /= static_cast<double>(total);

    double best_var = -1.0;
    int best_split = 0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < kBins - 1; ++t) {
        w0 += static_cast<double>(hist[t]);
        sum0 += static_cast<double>(hist[t]) * t;
        if (w0 == 0.0) continue;
        const double w1 = static_cast<double>(total) - w0;
        if (w1 == 0.0) break;
        const double m0 = sum0 / w0;
        const double m1 = (total_mean * total - sum0) / w1;
        const double var = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (var > best_var) {
            best_var = var;
            best_split = t;
        }
    }
    // Threshold at the upper edge of the chosen bin.
    return lo + (best_split + 1) * width;
}

namespace {

struct MagnitudeMaps {
    ScalarGrid vx_map, vy_map, coupled;
    std::vector<std::uint8_t> valid;
};

// Validity of a derivative-map pixel requires every tap of the stencil to
// land on a known ground-truth pixel.
std::vector<std::uint8_t> stencil_validity(const StencilOp& op, const FlowField& gt) {
    const int w = gt.width(), h = gt.height();
    std::vector<std::uint8_t> known(gt.vx.size());
    for (std::size_t p = 0; p < known.size(); ++p) known[p] = flow_pixel_known(gt, p);
    std::vector<std::uint8_t> valid(known.size(), 1);
    auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) {
            std::uint8_t ok = 1;
            for (int t = 0; t < op.count; ++t) {
                const int ii = clampi(i + op.taps[t].di, w - 1);
                const int jj = clampi(j + op.taps[t].dj, h - 1);
                ok &= known[static_cast<std::size_t>(jj) * w + ii];
            }
            valid[static_cast<std::size_t>(j) * w + i] = ok;
        }
    return valid;
}

MagnitudeMaps operator_maps(const StencilOp& op, const FlowField& gt) {
    MagnitudeMaps m;
    const ScalarGrid ax = apply_stencil(op, gt.vx);
    const ScalarGrid ay = apply_stencil(op, gt.vy);
    m.vx_map = ScalarGrid(gt.width(), gt.height());
    m.vy_map = ScalarGrid(gt.width(), gt.height());
    m.coupled = ScalarGrid(gt.width(), gt.height());
    for (std::size_t p = 0; p < ax.size(); ++p) {
        m.vx_map[p] = std::fabs(ax[p]);
        m.vy_map[p] = std::fabs(ay[p]);
        m.coupled[p] = std::sqrt(ax[p] * ax[p] + ay[p] * ay[p]);
    }
    m.valid = stencil_validity(op, gt);
    return m;
}

MapSparsity measure(const std::string& name, const ScalarGrid& map,
                    const std::vector<std::uint8_t>& valid) {
    MapSparsity s;
    s.name = name;
    s.otsu = otsu_threshold(map, valid);

    double lo = 0.0, hi = 0.0;
    bool first = true;
    std::size_t total = 0, above = 0;
    for (std::size_t p = 0; p < map.size(); ++p) {
        if (!valid.empty() && !valid[p]) continue;
        if (first) {
            lo = hi = map[p];
            first = false;
        } else {
            lo = std::min(lo, map[p]);
            hi = std::max(hi, map[p]);
        }
        ++total;
    }
    if (total == 0 || lo == hi) {
        s.nonzero_fraction = 0.0;  // constant map counts as fully sparse
        return s;
    }
    for (std::size_t p = 0; p < map.size(); ++p) {
        if (!valid.empty() && !valid[p]) continue;
        if (map[p] > s.otsu) ++above;
    }
    s.nonzero_fraction = static_cast<double>(above) / static_cast<double>(total);
    return s;
}

}  // namespace

SparsityReport sparsity_report(const FlowField& v_gt, DiagonalVariant variant) {
    const StencilOp* ops[4] = {&stencil_diff_x(), &stencil_diff_y(), &stencil_diff_xy(),
                               &stencil_diff_yx(variant)};
    const char* names[4] = {"dx", "dy", "dxy", "dyx"};

    SparsityReport rep;
    ScalarGrid grad_sq(v_gt.width(), v_gt.height(), 0.0);
    std::vector<std::uint8_t> grad_valid(v_gt.vx.size(), 1);

    for (int k = 0; k < 4; ++k) {
        MagnitudeMaps maps = operator_maps(*ops[k], v_gt);
        rep.coupled[k] = measure(names[k], maps.coupled, maps.valid);
        rep.per_channel.push_back(measure(std::string(names[k]) + "_vx", maps.vx_map, maps.valid));
        rep.per_channel.push_back(measure(std::string(names[k]) + "_vy", maps.vy_map, maps.valid));
        if (k < 2) {  // gradient magnitude couples dx and dy over both channels
            for (std::size_t p = 0; p < grad_sq.size(); ++p)
                grad_sq[p] += maps.coupled[p] * maps.coupled[p];
            for (std::size_t p = 0; p < grad_valid.size(); ++p) grad_valid[p] &= maps.valid[p];
        }
    }

    ScalarGrid grad(v_gt.width(), v_gt.height());
    for (std::size_t p = 0; p < grad.size(); ++p) grad[p] = std::sqrt(grad_sq[p]);
    rep.coupled[4] = measure("grad", grad, grad_valid);

    rep.partials_sparser_than_gradient = true;
    for (int k = 0; k < 4; ++k)
        if (rep.coupled[k].nonzero_fraction > rep.coupled[4].nonzero_fraction)
            rep.partials_sparser_than_gradient = false;
    return rep;
}

std::vector<std::uint8_t> binarize_with_otsu(const ScalarGrid& g) {
    const double thr = otsu_threshold(g);
    std::vector<std::uint8_t> out(g.size(), 0);
    double lo = g[0], hi = g[0];
    for (double v : g.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) return out;  // constant map: all zero
    for (std::size_t p = 0; p < g.size(); ++p) out[p] = g[p] > thr ? 1 : 0;
    return out;
}

}  // namespace hvdflow
