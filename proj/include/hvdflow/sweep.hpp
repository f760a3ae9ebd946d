#pragma once

#include <iosfwd>
#include <vector>

#include "hvdflow/solver.hpp"

namespace hvdflow {

struct SweepRow {
    SelectionScheme::Kind scheme;
    double ratio;
    int repetition;
    double mepe;
    double wall_ms;
};

struct SweepAggregate {
    SelectionScheme::Kind scheme;
    double ratio;
    int runs;
    double mean_mepe;
    double mean_wall_ms;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepAggregate> aggregates;
};

// Runs the solver over every (scheme, ratio) pair against ground truth.
// Stochastic schemes (random, combined) run `repetitions` times with seeds
// base+0..base+reps-1 and are averaged; deterministic schemes run once.
SweepResult sweep_ratios(const ImagePair& pair, const FlowField& gt, const SolverConfig& base,
                         const std::vector<double>& ratios,
                         const std::vector<SelectionScheme::Kind>& schemes, int repetitions);

// CSV with header scheme,ratio,repetition,mepe,wall_ms; aggregate rows carry
// repetition -1 and the per-(scheme, ratio) means.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

}  // namespace hvdflow
