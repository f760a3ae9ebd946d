#pragma once

#include <cstdint>
#include <vector>

#include "hvdflow/data_term.hpp"
#include "hvdflow/grid.hpp"
#include "hvdflow/regularizer.hpp"
#include "hvdflow/selection.hpp"

namespace hvdflow {

enum class RegularizerKind { hvd, tv_isotropic, tv_anisotropic };

const char* to_string(RegularizerKind kind);
RegularizerKind regularizer_kind_from_string(const std::string& name);

struct SolverConfig {
    double lambda = 0.01;
    double epsilon = 0.01;
    int max_iter = 500;
    double conv_tol = 1e-4;       // mean absolute flow update, in pixels
    double pyramid_scale = 0.70;
    int min_side = 16;
    DataTermKind data_kind = DataTermKind::OFC;
    SelectionScheme scheme{};     // full measurements by default
    RegularizerKind regularizer = RegularizerKind::hvd;
    DiagonalVariant diagonal = DiagonalVariant::mirrored;
    bool adaptive = false;        // image-adaptive weights on the regularizer
    double adaptive_alpha = 10.0;
    double adaptive_beta = 1.0;
    double dc_penalty = 1e-2;     // GDIM d/c stabilizer
    int warps_per_level = 1;
    bool allow_lambda_outside_range = false;

    void validate() const;  // throws std::invalid_argument
};

// Accelerated-scheme schedule, k starting at 1.
inline double solver_gamma(int k) { return 0.5 * (k + 1); }
inline double solver_tau(int k) { return 2.0 / (k + 3); }

struct LevelStats {
    int width = 0;
    int height = 0;
    int warp_pass = 0;
    int iterations = 0;      // summed over restarts
    int restarts = 0;
    bool converged = false;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double step_constant = 0.0;  // L actually used (after any doubling)
    int selected_pixels = 0;
};

struct SolveResult {
    Unknowns u;
    std::vector<LevelStats> levels;
};

// Huber data energy plus lambda times the regularizer on the flow blocks
// (the GDIM d/c stabilizer lives inside the data energy).
double total_energy(const DataTermSystem& sys, const Unknowns& u, const SolverConfig& cfg,
                    const RegularizerWeights& weights);
Unknowns total_gradient(const DataTermSystem& sys, const Unknowns& u, const SolverConfig& cfg,
                        const RegularizerWeights& weights);

// One level of the accelerated first-order iteration starting from v0.
// Returns the lowest-energy iterate encountered (v0 included), so the
// returned energy never exceeds the initial one.
Unknowns solve_level(const Unknowns& v0, const DataTermSystem& sys, const SolverConfig& cfg,
                     const RegularizerWeights& weights, LevelStats* stats = nullptr);

// Full coarse-to-fine estimation: pyramid, per-level warping and measurement
// selection, incremental solves, and flow accumulation.
SolveResult solve_coarse_to_fine(const ImagePair& pair, const SolverConfig& cfg);

}  // namespace hvdflow
