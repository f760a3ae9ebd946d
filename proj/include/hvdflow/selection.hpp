#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hvdflow/grid.hpp"

namespace hvdflow {

struct DerivativeStack;

// Per-pixel boolean selection of retained data-term rows.
struct MeasurementMask {
    std::vector<std::uint8_t> selected;
    int m = 0;        // number of selected pixels
    double ratio = 1.0;

    bool full() const { return m == static_cast<int>(selected.size()); }
    static MeasurementMask all(std::size_t n) {
        return {std::vector<std::uint8_t>(n, 1), static_cast<int>(n), 1.0};
    }
};

struct SelectionScheme {
    enum class Kind { full, random, significant, combined };

    Kind kind = Kind::full;
    double ratio = 1.0;               // m/n, in (0,1]
    double significant_fraction = 0.05;  // combined only, <= ratio
    std::uint64_t seed = 0;           // random/combined
};

const char* to_string(SelectionScheme::Kind kind);
SelectionScheme::Kind selection_kind_from_string(const std::string& name);

// Builds the mask for one derivative stack. Random and combined draws are
// reproducible from the scheme seed; significance is the first-order gradient
// magnitude (for GCA stacks, the larger of the two row magnitudes), ties
// broken by ascending pixel index.
MeasurementMask select(const SelectionScheme& scheme, const DerivativeStack& stack);

// Exposed for tests: per-pixel significance magnitudes used by `select`.
std::vector<double> significance_magnitudes(const DerivativeStack& stack);

}  // namespace hvdflow
