#include "hvdflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hvdflow/filters.hpp"
#include "hvdflow/pyramid.hpp"

namespace hvdflow {

const char* to_string(RegularizerKind kind) {
    switch (kind) {
        case RegularizerKind::hvd: return "hvd";
        case RegularizerKind::tv_isotropic: return "tv-iso";
        case RegularizerKind::tv_anisotropic: return "tv-aniso";
    }
    return "?";
}

RegularizerKind regularizer_kind_from_string(const std::string& name) {
    if (name == "hvd") return RegularizerKind::hvd;
    if (name == "tv-iso") return RegularizerKind::tv_isotropic;
    if (name == "tv-aniso") return RegularizerKind::tv_anisotropic;
    throw std::invalid_argument("unknown regularizer: " + name);
}

void SolverConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("SolverConfig: lambda must be finite and non-negative");
    if (!allow_lambda_outside_range && (lambda < 1e-3 || lambda > 1e-1))
        throw std::invalid_argument(
            "SolverConfig: lambda outside [1e-3, 1e-1]; set allow_lambda_outside_range to override");
    if (!(epsilon > 0.0)) throw std::invalid_argument("SolverConfig: epsilon must be positive");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    if (conv_tol < 0.0) throw std::invalid_argument("SolverConfig: conv_tol must be >= 0");
    if (pyramid_scale <= 0.0 || pyramid_scale >= 1.0)
        throw std::invalid_argument("SolverConfig: pyramid_scale must lie in (0,1)");
    if (min_side < 8) throw std::invalid_argument("SolverConfig: min_side must be >= 8");
    if (warps_per_level < 1)
        throw std::invalid_argument("SolverConfig: warps_per_level must be >= 1");
    if (dc_penalty < 0.0) throw std::invalid_argument("SolverConfig: dc_penalty must be >= 0");
}

namespace {

double reg_energy(const FlowField& v, const SolverConfig& cfg, const RegularizerWeights& w) {
    switch (cfg.regularizer) {
        case RegularizerKind::hvd: return hvd_energy(v, cfg.epsilon, w, cfg.diagonal);
        case RegularizerKind::tv_isotropic: return tv_energy(v, cfg.epsilon, TvVariant::isotropic);
        case RegularizerKind::tv_anisotropic:
            return w.uniform() ? tv_energy(v, cfg.epsilon, TvVariant::anisotropic)
                               : tv_energy(v, cfg.epsilon, TvVariant::weighted_anisotropic, w);
    }
    return 0.0;
}

FlowField reg_gradient(const FlowField& v, const SolverConfig& cfg, const RegularizerWeights& w) {
    switch (cfg.regularizer) {
        case RegularizerKind::hvd: return hvd_gradient(v, cfg.epsilon, w, cfg.diagonal);
        case RegularizerKind::tv_isotropic:
            return tv_gradient(v, cfg.epsilon, TvVariant::isotropic);
        case RegularizerKind::tv_anisotropic:
            return w.uniform() ? tv_gradient(v, cfg.epsilon, TvVariant::anisotropic)
                               : tv_gradient(v, cfg.epsilon, TvVariant::weighted_anisotropic, w);
    }
    return FlowField(v.width(), v.height());
}

bool finite(const Unknowns& u) {
    if (!all_finite(u.flow)) return false;
    if (u.has_brightness && (!all_finite(u.d) || !all_finite(u.c))) return false;
    return true;
}

template <typename Fn>
void for_each_block(Unknowns& u, Fn&& fn) {
    fn(u.flow.vx);
    fn(u.flow.vy);
    if (u.has_brightness) {
        fn(u.d);
        fn(u.c);
    }
}

template <typename Fn>
void zip_blocks(Unknowns& a, const Unknowns& b, Fn&& fn) {
    fn(a.flow.vx, b.flow.vx);
    fn(a.flow.vy, b.flow.vy);
    if (a.has_brightness) {
        fn(a.d, b.d);
        fn(a.c, b.c);
    }
}

void axpy(Unknowns& y, double a, const Unknowns& x) {
    zip_blocks(y, x, [a](ScalarGrid& yd, const ScalarGrid& xd) {
        for (std::size_t p = 0; p < yd.size(); ++p) yd[p] += a * xd[p];
    });
}

double mean_abs_flow_diff(const FlowField& a, const FlowField& b) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.vx.size(); ++p) {
        s += std::fabs(a.vx[p] - b.vx[p]);
        s += std::fabs(a.vy[p] - b.vy[p]);
    }
    return s / (2.0 * static_cast<double>(a.vx.size()));
}

// Upper bound on the data Hessian norm: the per-pixel rows decouple, so the
// largest per-pixel coefficient sum of squares over epsilon bounds it.
double data_step_bound(const DataTermSystem& sys, double eps) {
    std::vector<double> sumsq(static_cast<std::size_t>(sys.width) * sys.height, 0.0);
    for (std::size_t r = 0; r < sys.rows(); ++r) {
        if (!sys.row_active[r]) continue;
        double s = sys.coeff_vx[r] * sys.coeff_vx[r] + sys.coeff_vy[r] * sys.coeff_vy[r];
        if (sys.kind == DataTermKind::GDIM)
            s += sys.coeff_d[r] * sys.coeff_d[r] + sys.coeff_c[r] * sys.coeff_c[r];
        sumsq[sys.row_pixel[r]] += s;
    }
    double worst = 0.0;
    for (double s : sumsq) worst = std::max(worst, s);
    double bound = worst / eps;
    if (sys.kind == DataTermKind::GDIM) bound += 2.0 * sys.dc_penalty;
    return std::max(bound, 1e-9);
}

std::uint64_t mix_seed(std::uint64_t seed, int level, int warp) {
    const std::uint64_t salt = 0x9E3779B97F4A7C15ULL;
    return seed ^ (salt * static_cast<std::uint64_t>(level * 131 + warp + 1));
}

}  // namespace

double total_energy(const DataTermSystem& sys, const Unknowns& u, const SolverConfig& cfg,
                    const RegularizerWeights& weights) {
    return data_energy(sys, u, cfg.epsilon) +
           cfg.lambda * reg_energy(u.flow, cfg, weights);
}

Unknowns total_gradient(const DataTermSystem& sys, const Unknowns& u, const SolverConfig& cfg,
                        const RegularizerWeights& weights) {
    Unknowns grad = data_gradient(sys, u, cfg.epsilon);
    if (cfg.lambda != 0.0) {
        const FlowField rg = reg_gradient(u.flow, cfg, weights);
        for (std::size_t p = 0; p < rg.vx.size(); ++p) {
            grad.flow.vx[p] += cfg.lambda * rg.vx[p];
            grad.flow.vy[p] += cfg.lambda * rg.vy[p];
        }
    }
    return grad;
}

Unknowns solve_level(const Unknowns& v0, const DataTermSystem& sys, const SolverConfig& cfg,
                     const RegularizerWeights& weights, LevelStats* stats) {
    if (!finite(v0)) throw std::invalid_argument("solve_level: non-finite initial unknowns");

    // 16/eps bounds the HVD block curvature (operator norms at most 4), but a
    // valid step constant for the whole gradient needs the data curvature
    // max_p |A_p|^2 / eps as well; without it the iterates hover off optimum.
    double L = 16.0 * cfg.lambda / cfg.epsilon + data_step_bound(sys, cfg.epsilon);

    const double e0 = total_energy(sys, v0, cfg, weights);
    Unknowns best = v0;
    double best_energy = e0;

    int total_iterations = 0;
    int restarts = 0;
    bool converged = false;
    const int max_restarts = 60;

    for (;;) {
        Unknowns v = v0;
        Unknowns grad_sum = Unknowns::zeros(sys.kind, sys.width, sys.height);
        bool blew_up = false;

        for (int k = 1; k <= cfg.max_iter; ++k) {
            ++total_iterations;
            const Unknowns grad = total_gradient(sys, v, cfg, weights);
            if (!finite(grad))
                throw std::runtime_error("solve_level: non-finite gradient (bad conditioning)");

            const double gamma = solver_gamma(k);
            const double tau = solver_tau(k);
            axpy(grad_sum, gamma, grad);

            Unknowns p = v;
            axpy(p, -1.0 / L, grad);
            Unknowns q = v0;
            axpy(q, -1.0 / L, grad_sum);

            // The accumulated anchor q carries weights gamma_k ~ k/2, so it
            // enters with tau_k ~ 2/k (tau_k * gamma_k bounded); the plain
            // gradient step p carries the complementary weight.
            Unknowns next = p;
            zip_blocks(next, q, [tau](ScalarGrid& nd, const ScalarGrid& qd) {
                for (std::size_t i = 0; i < nd.size(); ++i)
                    nd[i] = (1.0 - tau) * nd[i] + tau * qd[i];
            });

            const double delta = mean_abs_flow_diff(next.flow, v.flow);
            v = std::move(next);

            const double e = total_energy(sys, v, cfg, weights);
            if (e < best_energy) {
                best_energy = e;
                best = v;
            }
            // Step-size safeguard: the fixed L underestimates the data
            // curvature, so a runaway iterate doubles L and restarts the level.
            if (e > 10.0 * e0 + 1e-12 && restarts < max_restarts) {
                L *= 2.0;
                ++restarts;
                blew_up = true;
                break;
            }
            if (delta < cfg.conv_tol) {
                converged = true;
                break;
            }
        }
        if (!blew_up) break;
    }

    if (stats) {
        stats->width = sys.width;
        stats->height = sys.height;
        stats->iterations = total_iterations;
        stats->restarts = restarts;
        stats->converged = converged;
        stats->initial_energy = e0;
        stats->final_energy = best_energy;
        stats->step_constant = L;
        stats->selected_pixels = static_cast<int>(sys.active_rows());
    }
    return best;
}

SolveResult solve_coarse_to_fine(const ImagePair& pair, const SolverConfig& cfg) {
    cfg.validate();
    validate_image_pair(pair);
    const Pyramid pyr = build_pyramid(pair, cfg.pyramid_scale, cfg.min_side);

    SolveResult result;
    FlowField accumulated(pyr.coarsest().width(), pyr.coarsest().height());
    ScalarGrid last_d, last_c;

    for (int lev = 0; lev < pyr.level_count(); ++lev) {
        const ImagePair& frames = pyr.levels[lev];
        const int w = frames.width(), h = frames.height();

        if (lev > 0) {
            // Flow units are pixels of the level's own grid.
            const double rx = static_cast<double>(w) / accumulated.width();
            const double ry = static_cast<double>(h) / accumulated.height();
            FlowField up(w, h);
            up.vx = resample_bilinear(accumulated.vx, w, h);
            up.vy = resample_bilinear(accumulated.vy, w, h);
            for (std::size_t p = 0; p < up.vx.size(); ++p) {
                up.vx[p] *= rx;
                up.vy[p] *= ry;
            }
            accumulated = std::move(up);
        }

        RegularizerWeights weights;
        if (cfg.adaptive)
            weights = adaptive_weights(gaussian_smooth(frames.frame0, 1.0, 5),
                                       cfg.adaptive_alpha, cfg.adaptive_beta);

        for (int warp = 0; warp < cfg.warps_per_level; ++warp) {
            const DerivativeStack stack = compute_derivatives(frames, accumulated, cfg.data_kind);

            SelectionScheme scheme = cfg.scheme;
            scheme.seed = mix_seed(cfg.scheme.seed, lev, warp);
            const MeasurementMask mask = select(scheme, stack);

            DataTermSystem sys;
            switch (cfg.data_kind) {
                case DataTermKind::OFC: sys = build_ofc(stack, mask); break;
                case DataTermKind::GCA: sys = build_gca(stack, mask); break;
                case DataTermKind::GDIM: sys = build_gdim(stack, mask, cfg.dc_penalty); break;
            }

            LevelStats stats;
            stats.warp_pass = warp;
            const Unknowns increment =
                solve_level(Unknowns::zeros(cfg.data_kind, w, h), sys, cfg, weights, &stats);
            result.levels.push_back(stats);

            for (std::size_t p = 0; p < accumulated.vx.size(); ++p) {
                accumulated.vx[p] += increment.flow.vx[p];
                accumulated.vy[p] += increment.flow.vy[p];
            }
            if (cfg.data_kind == DataTermKind::GDIM) {
                last_d = increment.d;
                last_c = increment.c;
            }
        }
    }

    result.u.flow = std::move(accumulated);
    if (cfg.data_kind == DataTermKind::GDIM) {
        result.u.d = std::move(last_d);
        result.u.c = std::move(last_c);
        result.u.has_brightness = true;
    }
    return result;
}

}  // namespace hvdflow
