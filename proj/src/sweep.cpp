#include "hvdflow/sweep.hpp"

#include <chrono>
#include <ostream>
#include <stdexcept>

#include "hvdflow/evaluation.hpp"

namespace hvdflow {

SweepResult sweep_ratios(const ImagePair& pair, const FlowField& gt, const SolverConfig& base,
                         const std::vector<double>& ratios,
                         const std::vector<SelectionScheme::Kind>& schemes, int repetitions) {
    if (repetitions < 1) throw std::invalid_argument("sweep_ratios: repetitions must be >= 1");
    if (!gt.vx.same_size(pair.frame0))
        throw std::invalid_argument("sweep_ratios: ground truth dimensions differ from frames");

    SweepResult result;
    for (SelectionScheme::Kind kind : schemes) {
        const bool stochastic = kind == SelectionScheme::Kind::random ||
                                kind == SelectionScheme::Kind::combined;
        for (double ratio : ratios) {
            const int runs = stochastic ? repetitions : 1;
            double mepe_sum = 0.0, wall_sum = 0.0;
            for (int rep = 0; rep < runs; ++rep) {
                SolverConfig cfg = base;
                cfg.scheme.kind = kind;
                cfg.scheme.ratio = ratio;
                cfg.scheme.seed = base.scheme.seed + static_cast<std::uint64_t>(rep);

                const auto t0 = std::chrono::steady_clock::now();
                const SolveResult solve = solve_coarse_to_fine(pair, cfg);
                const auto t1 = std::chrono::steady_clock::now();
                const double wall_ms =
                    std::chrono::duration<double, std::milli>(t1 - t0).count();

                const double err = mepe(solve.u.flow, gt);
                result.rows.push_back({kind, ratio, rep, err, wall_ms});
                mepe_sum += err;
                wall_sum += wall_ms;
            }
            result.aggregates.push_back(
                {kind, ratio, runs, mepe_sum / runs, wall_sum / runs});
        }
    }
    return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "scheme,ratio,repetition,mepe,wall_ms\n";
    char buf[160];
    for (const SweepRow& r : result.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%d,%.9g,%.3f\n", to_string(r.scheme), r.ratio,
                      r.repetition, r.mepe, r.wall_ms);
        os << buf;
    }
    for (const SweepAggregate& a : result.aggregates) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%d,%.9g,%.3f\n", to_string(a.scheme), a.ratio,
                      -1, a.mean_mepe, a.mean_wall_ms);
        os << buf;
    }
}

}  // namespace hvdflow
